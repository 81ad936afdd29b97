#include "mfa/mlop.hpp"

#include "mfa/log.hpp"
#include "mfa/rng.hpp"

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <limits>
#include <ostream>
#include <sstream>

namespace mfa::mlop {

namespace {

constexpr double kCoincidentRatio = 1e-12;
constexpr double kPerturbRatio = 1e-9;
constexpr double kDivergenceRatio = 1e6;
constexpr std::size_t kDefaultSketchDim = 20;
constexpr std::uint64_t kSketchStream = 0x5EED0001;
constexpr std::uint64_t kPerturbStream = 0x5EED0002;

void requireSameDim(const PointCloud& p, const PointCloud& q) {
    if (p.dim() != q.dim()) {
        throw InvalidInput("MLOP: P has dimension " + std::to_string(p.dim()) + ", Q has " +
                           std::to_string(q.dim()));
    }
}

/// Clouds translated so that P has zero mean, plus their metric coordinates.
struct Frame {
    Eigen::RowVectorXd center;
    Matrix p;
    Matrix pMetric;
    Eigen::VectorXd pMetricSq;
};

Frame makeFrame(const Matrix& p, const NormModel& norms) {
    Frame f;
    f.center = p.colwise().mean();
    f.p = p.rowwise() - f.center;
    f.pMetric = norms.coordinates(f.p);
    f.pMetricSq = f.pMetric.rowwise().squaredNorm();
    return f;
}

ForceTerms computeTerms(const Frame& frame, const Matrix& q, const Matrix& qMetric, const MlopConfig& cfg) {
    const auto count = q.rows();
    ForceTerms terms;

    // Attraction: pairwise squared distances via one product, then
    // A = diag(rowsum alpha) Q - alpha P.
    const Eigen::VectorXd qSq = qMetric.rowwise().squaredNorm();
    Matrix d2 = -2.0 * (qMetric * frame.pMetric.transpose());
    d2.colwise() += qSq;
    d2.rowwise() += frame.pMetricSq.transpose();

    const double invH1Sq = 1.0 / (cfg.h1 * cfg.h1);
    Matrix alpha(count, frame.p.rows());
    double energy = 0.0;
    for (Eigen::Index i = 0; i < count; ++i) {
        for (Eigen::Index j = 0; j < frame.p.rows(); ++j) {
            const double r2 = std::max(d2(i, j), 0.0);
            const double hSq = r2 + cfg.eps;
            const double h = std::sqrt(hSq);
            const double w = std::exp(-r2 * invH1Sq);
            alpha(i, j) = w / h * (1.0 - 2.0 * hSq * invH1Sq);
            energy += h * w;
        }
    }
    terms.attractionEnergy = energy;
    terms.attraction = q.array().colwise() * alpha.rowwise().sum().array();
    terms.attraction.noalias() -= alpha * frame.p;

    // Repulsion: exact pairwise distances (these get small).
    Matrix beta = Matrix::Zero(count, count);
    terms.repulsionEnergy = Eigen::VectorXd::Zero(count);
    const double invH2Sq = 1.0 / (cfg.h2 * cfg.h2);
    for (Eigen::Index i = 0; i < count; ++i) {
        for (Eigen::Index k = i + 1; k < count; ++k) {
            const double r = (qMetric.row(i) - qMetric.row(k)).norm();
            if (!(r > 0.0)) {
                throw InvalidInput("MLOP: points " + std::to_string(i) + " and " + std::to_string(k) +
                                   " of Q coincide");
            }
            const double b = repulsionCoeffFromDistance(r, cfg);
            beta(i, k) = b;
            beta(k, i) = b;
            const double e = eta(r) * std::exp(-r * r * invH2Sq);
            terms.repulsionEnergy(i) += e;
            terms.repulsionEnergy(k) += e;
        }
    }
    terms.repulsion = q.array().colwise() * beta.rowwise().sum().array();
    terms.repulsion.noalias() -= beta * q;
    return terms;
}

ForceTerms termsFor(const PointCloud& p, const PointCloud& q, const MlopConfig& cfg, const NormModel& norms) {
    requireSameDim(p, q);
    const Frame frame = makeFrame(p.matrix(), norms);
    const Matrix qc = q.matrix().rowwise() - frame.center;
    return computeTerms(frame, qc, norms.coordinates(qc), cfg);
}

void requireLambdas(const PointCloud& q, const Eigen::VectorXd& lambdas) {
    if (static_cast<std::size_t>(lambdas.size()) != q.size()) {
        throw InvalidInput("MLOP: expected " + std::to_string(q.size()) + " balance factors, got " +
                           std::to_string(lambdas.size()));
    }
    if (!lambdas.allFinite()) {
        throw InvalidInput("MLOP: balance factors must be finite");
    }
}

double boundingDiagonal(const Matrix& a, const Matrix& b) {
    const Eigen::RowVectorXd lo = a.colwise().minCoeff().cwiseMin(b.colwise().minCoeff());
    const Eigen::RowVectorXd hi = a.colwise().maxCoeff().cwiseMax(b.colwise().maxCoeff());
    return (hi - lo).norm();
}

/// Nudges apart any pair of Q points closer than 1e-12 h2 in the metric.
void separateCoincident(Matrix& q, Matrix& qMetric, const NormModel& norms, const MlopConfig& cfg, int iter) {
    const double tooClose = kCoincidentRatio * cfg.h2;
    Rng rng(deriveSeed(cfg.seed, kPerturbStream + static_cast<std::uint64_t>(iter)));
    for (Eigen::Index i = 0; i < q.rows(); ++i) {
        for (Eigen::Index k = i + 1; k < q.rows(); ++k) {
            while ((qMetric.row(i) - qMetric.row(k)).norm() < tooClose) {
                Eigen::RowVectorXd dir(q.cols());
                for (Eigen::Index c = 0; c < q.cols(); ++c) {
                    dir(c) = rng.normal();
                }
                q.row(k) += (kPerturbRatio * cfg.h2 / dir.norm()) * dir;
                qMetric.row(k) = norms.coordinates(q.row(k));
            }
        }
    }
}

} // namespace

std::string toString(LambdaSchedule schedule) {
    return schedule == LambdaSchedule::FirstIteration ? "first-iteration" : "every-iteration";
}

LambdaSchedule lambdaScheduleFromString(const std::string& name) {
    if (name == "first-iteration") {
        return LambdaSchedule::FirstIteration;
    }
    if (name == "every-iteration") {
        return LambdaSchedule::EveryIteration;
    }
    throw InvalidInput("unknown lambda schedule '" + name + "'");
}

void MlopConfig::validate() const {
    if (!(eps > 0.0)) {
        throw InvalidInput("MLOP: eps must be > 0");
    }
    if (!(h1 > 0.0) || !(h2 > 0.0)) {
        throw InvalidInput("MLOP: support sizes h1, h2 must be > 0");
    }
    if (maxIters < 0) {
        throw InvalidInput("MLOP: maxIters must be >= 0");
    }
    if (!(gradTol >= 0.0)) {
        throw InvalidInput("MLOP: gradTol must be >= 0");
    }
    if (gamma0 && !(*gamma0 > 0.0)) {
        throw InvalidInput("MLOP: gamma0 must be > 0");
    }
}

double eta(double r) {
    return 1.0 / (3.0 * r * r * r);
}

double etaSlope(double r) {
    const double r2 = r * r;
    return 1.0 / (r2 * r2);
}

double attractionCoeffFromSquared(double squaredDistance, const MlopConfig& cfg) {
    const double hSq = squaredDistance + cfg.eps;
    const double invH1Sq = 1.0 / (cfg.h1 * cfg.h1);
    return std::exp(-squaredDistance * invH1Sq) / std::sqrt(hSq) * (1.0 - 2.0 * hSq * invH1Sq);
}

double repulsionCoeffFromDistance(double distance, const MlopConfig& cfg) {
    if (!(distance > 0.0)) {
        throw InvalidInput("repulsion coefficient is undefined for coincident points");
    }
    const double r = distance;
    const double wHat = std::exp(-r * r / (cfg.h2 * cfg.h2));
    return wHat / r * (etaSlope(r) + 2.0 * eta(r) / (cfg.h2 * cfg.h2) * r);
}

double attractionCoeff(const RowRef& q, const RowRef& p, const MlopConfig& cfg) {
    if (q.size() != p.size()) {
        throw InvalidInput("attractionCoeff: dimension mismatch");
    }
    return attractionCoeffFromSquared((q - p).squaredNorm(), cfg);
}

double repulsionCoeff(const RowRef& q, const RowRef& qOther, const MlopConfig& cfg) {
    if (q.size() != qOther.size()) {
        throw InvalidInput("repulsionCoeff: dimension mismatch");
    }
    return repulsionCoeffFromDistance((q - qOther).norm(), cfg);
}

double bbStep(const RowRef& dq, const RowRef& dg, double fallback) {
    const double gg = dg.squaredNorm();
    if (!(gg > 0.0)) {
        return fallback;
    }
    return dq.dot(dg) / gg;
}

NormModel::NormModel(const PointCloud& cloud, const MlopConfig& cfg) {
    if (cfg.useSketch) {
        const std::size_t m = cfg.sketchDim == 0 ? std::min(cloud.dim(), kDefaultSketchDim) : cfg.sketchDim;
        sketch_ = buildSketch(cloud, m, deriveSeed(cfg.seed, kSketchStream));
    }
}

Matrix NormModel::coordinates(const Matrix& rows) const {
    return sketch_ ? sketch_->projectRows(rows) : rows;
}

double NormModel::norm(const RowRef& x) const {
    return sketch_ ? sketchedNorm(*sketch_, x) : x.norm();
}

ForceTerms forceTerms(const Matrix& p, const Matrix& q, const MlopConfig& cfg, const NormModel& norms) {
    return termsFor(PointCloud(p), PointCloud(q), cfg, norms);
}

double cost(const PointCloud& p, const PointCloud& q, const Eigen::VectorXd& lambdas, const MlopConfig& cfg) {
    cfg.validate();
    requireLambdas(q, lambdas);
    const NormModel norms(p, cfg);
    const auto terms = termsFor(p, q, cfg, norms);
    // repulsionEnergy(i) already holds sum over i' of eta * w_hat for point i.
    return terms.attractionEnergy + lambdas.dot(terms.repulsionEnergy);
}

double pointCost(const PointCloud& p, const PointCloud& q, const Eigen::VectorXd& lambdas, std::size_t i,
                 const MlopConfig& cfg) {
    cfg.validate();
    requireLambdas(q, lambdas);
    requireSameDim(p, q);
    if (i >= q.size()) {
        throw InvalidInput("pointCost: index out of range");
    }
    const NormModel norms(p, cfg);
    const Frame frame = makeFrame(p.matrix(), norms);
    const Matrix qc = q.matrix().rowwise() - frame.center;
    const Matrix qm = norms.coordinates(qc);
    const auto idx = static_cast<Eigen::Index>(i);

    double attraction = 0.0;
    for (Eigen::Index j = 0; j < frame.pMetric.rows(); ++j) {
        const double r2 = (qm.row(idx) - frame.pMetric.row(j)).squaredNorm();
        attraction += std::sqrt(r2 + cfg.eps) * std::exp(-r2 / (cfg.h1 * cfg.h1));
    }
    double repulsion = 0.0;
    for (Eigen::Index k = 0; k < qm.rows(); ++k) {
        if (k == idx) {
            continue;
        }
        const double r = (qm.row(idx) - qm.row(k)).norm();
        if (!(r > 0.0)) {
            throw InvalidInput("pointCost: coincident Q points");
        }
        repulsion += eta(r) * std::exp(-r * r / (cfg.h2 * cfg.h2));
    }
    return attraction + lambdas(idx) * repulsion;
}

Eigen::VectorXd balanceLambda(const ForceTerms& terms, const NormModel& norms) {
    const auto count = terms.attraction.rows();
    Eigen::VectorXd lambdas(count);
    for (Eigen::Index i = 0; i < count; ++i) {
        const double num = norms.norm(terms.attraction.row(i));
        const double den = norms.norm(terms.repulsion.row(i));
        if (!(den > 0.0)) {
            log::warn("balance factor for isolated point " + std::to_string(i) + " set to 0");
            lambdas(i) = 0.0;
            continue;
        }
        lambdas(i) = -num / den;
    }
    return lambdas;
}

Eigen::VectorXd balanceLambda(const PointCloud& p, const PointCloud& q, const MlopConfig& cfg) {
    cfg.validate();
    const NormModel norms(p, cfg);
    return balanceLambda(termsFor(p, q, cfg, norms), norms);
}

Matrix gradient(const PointCloud& p, const PointCloud& q, const Eigen::VectorXd& lambdas, const MlopConfig& cfg) {
    cfg.validate();
    requireLambdas(q, lambdas);
    const NormModel norms(p, cfg);
    const auto terms = termsFor(p, q, cfg, norms);
    return terms.attraction - (terms.repulsion.array().colwise() * lambdas.array()).matrix();
}

PointCloud initQ(const PointCloud& p, std::size_t count, std::uint64_t seed) {
    if (count < 1 || count > p.size()) {
        throw InvalidInput("initQ: need 1 <= I <= J, got I = " + std::to_string(count) + ", J = " +
                           std::to_string(p.size()));
    }
    Rng rng(seed);
    const auto picks = sampleWithoutReplacement(p.size(), count, rng);
    Matrix q(static_cast<Eigen::Index>(count), static_cast<Eigen::Index>(p.dim()));
    for (std::size_t i = 0; i < count; ++i) {
        q.row(static_cast<Eigen::Index>(i)) = p.row(picks[i]);
    }
    return PointCloud(std::move(q));
}

MlopResult runMlop(const PointCloud& p, const PointCloud& q0, const MlopConfig& cfg) {
    cfg.validate();
    requireSameDim(p, q0);

    MlopResult result{q0, {}, Eigen::VectorXd::Zero(static_cast<Eigen::Index>(q0.size())), false};
    if (cfg.maxIters == 0) {
        return result;
    }

    const NormModel norms(p, cfg);
    const Frame frame = makeFrame(p.matrix(), norms);
    Matrix q = q0.matrix().rowwise() - frame.center;
    const double limit = kDivergenceRatio * std::max(boundingDiagonal(frame.p, q), 1e-300);

    Matrix prevQ;
    Matrix prevGrad;
    Eigen::VectorXd weights;
    double gamma0 = cfg.gamma0.value_or(0.0);

    for (int iter = 0; iter < cfg.maxIters; ++iter) {
        Matrix qMetric = norms.coordinates(q);
        separateCoincident(q, qMetric, norms, cfg, iter);
        const ForceTerms terms = computeTerms(frame, q, qMetric, cfg);

        if (iter == 0 || cfg.lambdaSchedule == LambdaSchedule::EveryIteration) {
            // Balance factors are <= 0; subtracting them as signed values would
            // turn the repulsion into attraction, so the magnitudes are applied.
            weights = -balanceLambda(terms, norms);
        }
        const Matrix grad = terms.attraction - (terms.repulsion.array().colwise() * weights.array()).matrix();
        const Eigen::VectorXd gradNorms = grad.rowwise().norm();
        const double maxGrad = gradNorms.maxCoeff();
        if (!std::isfinite(maxGrad)) {
            throw NumericalError("MLOP: non-finite gradient at iteration " + std::to_string(iter));
        }

        TraceRow row;
        row.iter = iter;
        row.maxGradNorm = maxGrad;
        row.costEstimate = terms.attractionEnergy + weights.dot(terms.repulsionEnergy);
        if (maxGrad <= cfg.gradTol) {
            result.trace.push_back(row);
            result.converged = true;
            break;
        }

        if (iter == 0 && !cfg.gamma0) {
            gamma0 = 0.1 * cfg.h1 / (1.0 + maxGrad);
        }
        Matrix next(q.rows(), q.cols());
        for (Eigen::Index i = 0; i < q.rows(); ++i) {
            double gamma = gamma0;
            if (iter > 0) {
                gamma = bbStep(q.row(i) - prevQ.row(i), grad.row(i) - prevGrad.row(i), gamma0);
                if (!(gamma > 0.0) || !std::isfinite(gamma)) {
                    gamma = gamma0;
                }
            }
            next.row(i) = q.row(i) - gamma * grad.row(i);
        }
        row.meanDisplacement = (next - q).rowwise().norm().mean();
        result.trace.push_back(row);

        const double reach = next.cwiseAbs().maxCoeff();
        if (!(reach <= limit)) {
            Eigen::Index worst = 0;
            next.cwiseAbs().rowwise().maxCoeff().maxCoeff(&worst);
            std::ostringstream msg;
            msg << "MLOP diverged at iteration " << iter << ": point " << worst << " reached |x| = " << reach
                << " (limit " << limit << ")";
            throw NumericalError(msg.str());
        }

        prevQ = std::move(q);
        prevGrad = grad;
        q = std::move(next);
    }

    result.q = PointCloud(Matrix(q.rowwise() + frame.center));
    result.repulsionWeights = weights;
    return result;
}

void writeTraceCsv(std::ostream& out, const std::vector<TraceRow>& trace) {
    out << "iter,maxGradNorm,meanDisplacement,costEstimate\n";
    out << std::setprecision(17);
    for (const auto& row : trace) {
        out << row.iter << ',' << row.maxGradNorm << ',' << row.meanDisplacement << ',' << row.costEstimate
            << '\n';
    }
}

} // namespace mfa::mlop
