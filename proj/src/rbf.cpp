#include "mfa/rbf.hpp"

#include "mfa/geometry.hpp"
#include "mfa/log.hpp"

#include <cmath>
#include <sstream>

namespace mfa::rbf {

namespace {

constexpr double kMinRcond = 1e-12;
constexpr double kRidgeScale = 1e-10;
constexpr int kRefinementSteps = 3;

void requireModelInputs(const PointCloud& centers, const FunctionSamples& values, double h) {
    if (centers.size() != values.size()) {
        throw InvalidInput("RBF: " + std::to_string(centers.size()) + " centers but " +
                           std::to_string(values.size()) + " values");
    }
    if (values.codim() < 1) {
        throw InvalidInput("RBF: values need codomain dimension >= 1");
    }
    if (!(h > 0.0) || !std::isfinite(h)) {
        throw InvalidInput("RBF: support width h must be positive");
    }
}

void requireDim(const RowRef& z, std::size_t dim) {
    if (static_cast<std::size_t>(z.size()) != dim) {
        throw InvalidInput("RBF: evaluation point of dimension " + std::to_string(z.size()) +
                           ", centers have " + std::to_string(dim));
    }
}

Matrix gram(const PointCloud& centers, Kernel kernel, double h) {
    const auto& x = centers.matrix();
    const auto count = x.rows();
    Matrix g(count, count);
    for (Eigen::Index i = 0; i < count; ++i) {
        g(i, i) = phi(kernel, 0.0, h);
        for (Eigen::Index j = i + 1; j < count; ++j) {
            const double v = phi(kernel, (x.row(i) - x.row(j)).norm(), h);
            g(i, j) = v;
            g(j, i) = v;
        }
    }
    return g;
}

/// A few steps of iterative refinement; kept only while the residual shrinks.
Matrix refinedSolve(const Eigen::FullPivLU<Matrix>& lu, const Matrix& system, const Matrix& rhs) {
    Matrix x = lu.solve(rhs);
    Matrix r = rhs - system * x;
    for (int step = 0; step < kRefinementSteps; ++step) {
        const Matrix candidate = x + lu.solve(r);
        const Matrix rc = rhs - system * candidate;
        if (rc.cwiseAbs().maxCoeff() >= r.cwiseAbs().maxCoeff()) {
            break;
        }
        x = candidate;
        r = rc;
    }
    return x;
}

/// Solves system * x = rhs with complete pivoting. When ill-conditioned, the
/// leading `kernelBlock` diagonal entries receive a ridge and the solve is
/// repeated.
Matrix pivotedSolve(Matrix system, const Matrix& rhs, Eigen::Index kernelBlock, SolveReport& report) {
    Eigen::FullPivLU<Matrix> lu(system);
    report.rcond = lu.rcond();
    if (lu.isInvertible() && report.rcond >= kMinRcond) {
        return refinedSolve(lu, system, rhs);
    }
    const double ridge = kRidgeScale * system.topLeftCorner(kernelBlock, kernelBlock).trace() /
                         static_cast<double>(kernelBlock);
    system.topLeftCorner(kernelBlock, kernelBlock).diagonal().array() += ridge;
    lu.compute(system);
    report.regularized = true;
    report.ridge = ridge;
    const double regularizedRcond = lu.rcond();
    if (!lu.isInvertible() || !(regularizedRcond > 0.0)) {
        std::ostringstream msg;
        msg << "RBF system is singular even with ridge " << ridge << " (condition estimate "
            << (report.rcond > 0.0 ? 1.0 / report.rcond : INFINITY) << ")";
        throw NumericalError(msg.str());
    }
    return lu.solve(rhs);
}

double relativeResidual(const Matrix& fitted, const Matrix& target) {
    const double scale = target.cwiseAbs().maxCoeff();
    const double err = (fitted - target).cwiseAbs().maxCoeff();
    return scale > 0.0 ? err / scale : err;
}

Eigen::RowVectorXd kernelSum(const RbfModel& model, const RowRef& z) {
    const auto& x = model.centers.matrix();
    Eigen::RowVectorXd out = Eigen::RowVectorXd::Zero(model.coeffs.cols());
    for (Eigen::Index j = 0; j < x.rows(); ++j) {
        out += phi(model.kernel, (z - x.row(j)).norm(), model.h) * model.coeffs.row(j);
    }
    return out;
}

nlohmann::json rowsToJson(const Matrix& m) {
    auto out = nlohmann::json::array();
    for (Eigen::Index i = 0; i < m.rows(); ++i) {
        auto row = nlohmann::json::array();
        for (Eigen::Index c = 0; c < m.cols(); ++c) {
            row.push_back(m(i, c));
        }
        out.push_back(std::move(row));
    }
    return out;
}

Matrix rowsFromJson(const nlohmann::json& doc, const char* what) {
    if (!doc.is_array() || doc.empty()) {
        throw InvalidInput(std::string("model JSON: '") + what + "' must be a non-empty array of rows");
    }
    const auto cols = doc.front().size();
    Matrix m(static_cast<Eigen::Index>(doc.size()), static_cast<Eigen::Index>(cols));
    for (std::size_t i = 0; i < doc.size(); ++i) {
        if (!doc[i].is_array() || doc[i].size() != cols) {
            throw InvalidInput(std::string("model JSON: ragged rows in '") + what + "'");
        }
        for (std::size_t c = 0; c < cols; ++c) {
            m(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(c)) = doc[i][c].get<double>();
        }
    }
    return m;
}

} // namespace

std::string toString(Kernel kernel) {
    switch (kernel) {
    case Kernel::Phi1: return "phi1";
    case Kernel::Phi2: return "phi2";
    case Kernel::Phi3: return "phi3";
    }
    return "unknown";
}

Kernel kernelFromString(const std::string& name) {
    if (name == "phi1") return Kernel::Phi1;
    if (name == "phi2") return Kernel::Phi2;
    if (name == "phi3") return Kernel::Phi3;
    throw InvalidInput("unknown kernel '" + name + "' (expected phi1, phi2 or phi3)");
}

double phi(Kernel kernel, double r, double h) {
    const double s = r / h;
    const double g = std::exp(-s * s);
    switch (kernel) {
    case Kernel::Phi1: return g;
    case Kernel::Phi2: return g * (1.0 + s);
    case Kernel::Phi3: return g * (15.0 + s * (15.0 + s * (6.0 + s)));
    }
    return 0.0;
}

RbfModel fitRbf(const PointCloud& centers, const FunctionSamples& values, Kernel kernel, double h) {
    requireModelInputs(centers, values, h);
    RbfModel model;
    model.kernel = kernel;
    model.h = h;
    model.centers = centers;
    const Matrix g = gram(centers, kernel, h);
    model.coeffs = pivotedSolve(g, values.values, g.rows(), model.report);
    model.report.relativeResidual = relativeResidual(g * model.coeffs, values.values);
    return model;
}

Eigen::RowVectorXd evalRbf(const RbfModel& model, const RowRef& z) {
    requireDim(z, model.centers.dim());
    return kernelSum(model, z);
}

Matrix evalRbf(const RbfModel& model, const PointCloud& points) {
    Matrix out(static_cast<Eigen::Index>(points.size()), model.coeffs.cols());
    for (std::size_t k = 0; k < points.size(); ++k) {
        out.row(static_cast<Eigen::Index>(k)) = evalRbf(model, points.row(k));
    }
    return out;
}

std::vector<std::vector<int>> monomialExponents(std::size_t dim, int degree) {
    if (degree < 0) {
        throw InvalidInput("polynomial degree must be >= 0");
    }
    std::vector<std::vector<int>> out;
    std::vector<int> current(dim, 0);
    // Within one total degree, recursion assigns the largest exponent to the
    // earliest variable first: graded-lex.
    auto fill = [&](auto&& self, std::size_t var, int remaining) -> void {
        if (var + 1 == dim) {
            current[var] = remaining;
            out.push_back(current);
            return;
        }
        for (int e = remaining; e >= 0; --e) {
            current[var] = e;
            self(self, var + 1, remaining - e);
        }
        current[var] = 0;
    };
    for (int total = 0; total <= degree; ++total) {
        if (dim == 0) {
            if (total == 0) out.emplace_back();
            continue;
        }
        fill(fill, 0, total);
    }
    return out;
}

double evalMonomial(const std::vector<int>& exponents, const RowRef& x) {
    double v = 1.0;
    for (std::size_t c = 0; c < exponents.size(); ++c) {
        for (int e = 0; e < exponents[c]; ++e) {
            v *= x(static_cast<Eigen::Index>(c));
        }
    }
    return v;
}

RbfPolyModel fitRbfPoly(const PointCloud& centers, const FunctionSamples& values, Kernel kernel, double h,
                        int polyDegree) {
    requireModelInputs(centers, values, h);
    RbfPolyModel model;
    model.polyDegree = polyDegree;
    model.monomials = monomialExponents(centers.dim(), polyDegree);
    const auto count = static_cast<Eigen::Index>(centers.size());
    const auto terms = static_cast<Eigen::Index>(model.monomials.size());

    Matrix poly(count, terms);
    for (Eigen::Index j = 0; j < count; ++j) {
        for (Eigen::Index i = 0; i < terms; ++i) {
            poly(j, i) = evalMonomial(model.monomials[static_cast<std::size_t>(i)],
                                      centers.row(static_cast<std::size_t>(j)));
        }
    }
    Eigen::ColPivHouseholderQR<Matrix> rankCheck(poly);
    if (rankCheck.rank() < terms) {
        throw DegenerateInput("centers are not unisolvent for polynomials of degree " +
                              std::to_string(polyDegree) + " (rank " + std::to_string(rankCheck.rank()) +
                              " < " + std::to_string(terms) + ")");
    }

    Matrix system = Matrix::Zero(count + terms, count + terms);
    const Matrix g = gram(centers, kernel, h);
    system.topLeftCorner(count, count) = g;
    system.topRightCorner(count, terms) = poly;
    system.bottomLeftCorner(terms, count) = poly.transpose();
    Matrix rhs = Matrix::Zero(count + terms, values.values.cols());
    rhs.topRows(count) = values.values;

    model.base.kernel = kernel;
    model.base.h = h;
    model.base.centers = centers;
    const Matrix solution = pivotedSolve(system, rhs, count, model.base.report);
    model.base.coeffs = solution.topRows(count);
    model.polyCoeffs = solution.bottomRows(terms);
    model.base.report.relativeResidual =
        relativeResidual(g * model.base.coeffs + poly * model.polyCoeffs, values.values);
    return model;
}

Eigen::RowVectorXd evalRbfPoly(const RbfPolyModel& model, const RowRef& z) {
    Eigen::RowVectorXd out = evalRbf(model.base, z);
    for (std::size_t i = 0; i < model.monomials.size(); ++i) {
        out += evalMonomial(model.monomials[i], z) * model.polyCoeffs.row(static_cast<Eigen::Index>(i));
    }
    return out;
}

Matrix evalRbfPoly(const RbfPolyModel& model, const PointCloud& points) {
    Matrix out(static_cast<Eigen::Index>(points.size()), model.base.coeffs.cols());
    for (std::size_t k = 0; k < points.size(); ++k) {
        out.row(static_cast<Eigen::Index>(k)) = evalRbfPoly(model, points.row(k));
    }
    return out;
}

Eigen::RowVectorXd weightedAverage(const RowRef& z, const PointCloud& points, const FunctionSamples& values,
                                   double h) {
    if (points.empty() || points.size() != values.size()) {
        throw InvalidInput("weightedAverage: need a non-empty point set aligned with its values");
    }
    if (!(h > 0.0)) {
        throw InvalidInput("weightedAverage: h must be positive");
    }
    requireDim(z, points.dim());
    const auto& x = points.matrix();
    Eigen::VectorXd w(x.rows());
    for (Eigen::Index i = 0; i < x.rows(); ++i) {
        w(i) = std::exp(-(x.row(i) - z).squaredNorm() / (h * h));
    }
    const double total = w.sum();
    if (!(total > 0.0)) {
        log::warn("weighted average: all weights underflowed; using the nearest point's value");
        return values.values.row(static_cast<Eigen::Index>(geometry::nearestReference(z, points)));
    }
    return (w / total).transpose() * values.values;
}

Matrix weightedAverage(const PointCloud& queries, const PointCloud& points, const FunctionSamples& values,
                       double h) {
    Matrix out(static_cast<Eigen::Index>(queries.size()), values.values.cols());
    for (std::size_t k = 0; k < queries.size(); ++k) {
        out.row(static_cast<Eigen::Index>(k)) = weightedAverage(queries.row(k), points, values, h);
    }
    return out;
}

nlohmann::json toJson(const RbfModel& model) {
    return {{"kernel", toString(model.kernel)},
            {"h", model.h},
            {"centers", rowsToJson(model.centers.matrix())},
            {"coeffs", rowsToJson(model.coeffs)}};
}

nlohmann::json toJson(const RbfPolyModel& model) {
    auto doc = toJson(model.base);
    doc["polyDegree"] = model.polyDegree;
    doc["polyCoeffs"] = rowsToJson(model.polyCoeffs);
    return doc;
}

RbfModel rbfModelFromJson(const nlohmann::json& doc) {
    RbfModel model;
    model.kernel = kernelFromString(doc.at("kernel").get<std::string>());
    model.h = doc.at("h").get<double>();
    model.centers = PointCloud(rowsFromJson(doc.at("centers"), "centers"));
    model.coeffs = rowsFromJson(doc.at("coeffs"), "coeffs");
    if (static_cast<std::size_t>(model.coeffs.rows()) != model.centers.size() || !(model.h > 0.0)) {
        throw InvalidInput("model JSON: coefficient count must match centers and h must be positive");
    }
    return model;
}

RbfPolyModel rbfPolyModelFromJson(const nlohmann::json& doc) {
    RbfPolyModel model;
    model.base = rbfModelFromJson(doc);
    model.polyDegree = doc.at("polyDegree").get<int>();
    model.monomials = monomialExponents(model.base.centers.dim(), model.polyDegree);
    model.polyCoeffs = rowsFromJson(doc.at("polyCoeffs"), "polyCoeffs");
    if (static_cast<std::size_t>(model.polyCoeffs.rows()) != model.monomials.size()) {
        throw InvalidInput("model JSON: polyCoeffs length does not match the monomial basis");
    }
    return model;
}

} // namespace mfa::rbf
