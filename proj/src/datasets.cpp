#include "mfa/datasets.hpp"

#include "mfa/rng.hpp"

#include <cmath>
#include <limits>
#include <numbers>

namespace mfa::datasets {

namespace {

enum Stream : std::uint64_t { kEmbedding = 1, kParams = 2, kDomainNoise = 3, kCodomainNoise = 4 };

void requireCount(std::size_t count, const char* name) {
    if (count < 2) {
        throw InvalidInput(std::string(name) + ": need at least two points");
    }
}

void requireDim(std::size_t dim, std::size_t minimum, const char* name) {
    if (dim < minimum) {
        throw InvalidInput(std::string(name) + ": ambient dimension must be >= " + std::to_string(minimum));
    }
}

Matrix valuesFromParams(TestFunction fn, const Matrix& params) {
    Matrix values(params.rows(), 1);
    for (Eigen::Index j = 0; j < params.rows(); ++j) {
        values(j, 0) = evaluateTestFunction(fn, params.row(j));
    }
    return values;
}

void finish(GeneratedSet& set, Matrix clean, const Noise& noise) {
    if (!(noise.domain >= 0.0) || !(noise.codomain >= 0.0)) {
        throw InvalidInput("noise amplitudes must be >= 0");
    }
    set.noise = noise;
    const Matrix values = valuesFromParams(set.function, set.params);
    set.noisyPoints = PointCloud(addUniformNoise(clean, noise.domain, deriveSeed(set.seed, kDomainNoise)));
    set.cleanPoints = PointCloud(std::move(clean));
    set.noisyValues = FunctionSamples(addUniformNoise(values, noise.codomain, deriveSeed(set.seed, kCodomainNoise)));
    set.cleanValues = FunctionSamples(values);
}

} // namespace

std::string toString(TestFunction fn) {
    switch (fn) {
    case TestFunction::O2Smooth: return "o2-smooth";
    case TestFunction::O2NonSmooth: return "o2-nonsmooth";
    case TestFunction::Cylinder2D: return "cylinder2d";
    case TestFunction::AngleSum: return "angle-sum";
    case TestFunction::SwissT: return "swiss-t";
    }
    return "unknown";
}

double evaluateTestFunction(TestFunction fn, const RowRef& params) {
    switch (fn) {
    case TestFunction::O2Smooth: return 0.25 * (1.0 + std::sin(10.0 * params(0)));
    case TestFunction::O2NonSmooth: return (1.0 + std::acos(std::cos(10.0 * params(0)))) / 6.0;
    case TestFunction::Cylinder2D: return 1.3 * (1.0 + std::sin(0.5 * params(1) + 1.5 * params(0)));
    case TestFunction::AngleSum: return params.tail(params.size() - 1).sum();
    case TestFunction::SwissT: return params(0);
    }
    return std::numeric_limits<double>::quiet_NaN();
}

Matrix randomOrthogonal(std::size_t n, std::uint64_t seed) {
    if (n < 1) {
        throw InvalidInput("randomOrthogonal: n must be >= 1");
    }
    const auto size = static_cast<Eigen::Index>(n);
    Rng rng(seed);
    Eigen::MatrixXd g(size, size);
    for (Eigen::Index i = 0; i < size; ++i) {
        for (Eigen::Index c = 0; c < size; ++c) {
            g(i, c) = rng.normal();
        }
    }
    Eigen::HouseholderQR<Eigen::MatrixXd> qr(g);
    Eigen::MatrixXd q = qr.householderQ();
    const auto& r = qr.matrixQR();
    for (Eigen::Index c = 0; c < size; ++c) {
        if (r(c, c) < 0.0) {
            q.col(c) *= -1.0;
        }
    }
    return q;
}

Matrix addUniformNoise(const Matrix& data, double amplitude, std::uint64_t seed) {
    if (!(amplitude >= 0.0)) {
        throw InvalidInput("noise amplitude must be >= 0");
    }
    if (amplitude == 0.0) {
        return data;
    }
    Rng rng(seed);
    Matrix out = data;
    for (Eigen::Index j = 0; j < out.rows(); ++j) {
        for (Eigen::Index c = 0; c < out.cols(); ++c) {
            out(j, c) += rng.uniform(-amplitude, amplitude);
        }
    }
    return out;
}

PointCloud addUniformNoise(const PointCloud& cloud, double amplitude, std::uint64_t seed) {
    return PointCloud(addUniformNoise(cloud.matrix(), amplitude, seed));
}

GeneratedSet genO2(const O2Options& opts, const Noise& noise, std::uint64_t seed) {
    requireCount(opts.count, "genO2");
    requireDim(opts.dim, 4, "genO2");
    if (opts.function != TestFunction::O2Smooth && opts.function != TestFunction::O2NonSmooth) {
        throw InvalidInput("genO2: function must be o2-smooth or o2-nonsmooth");
    }
    GeneratedSet set;
    set.generator = "o2";
    set.function = opts.function;
    set.seed = seed;
    set.paramNames = {"theta"};

    const auto rows = static_cast<Eigen::Index>(opts.count);
    const auto dim = static_cast<Eigen::Index>(opts.dim);
    set.params.resize(rows, 1);
    Matrix local = Matrix::Zero(rows, dim);
    for (Eigen::Index j = 0; j < rows; ++j) {
        const double theta = -std::numbers::pi + 2.0 * std::numbers::pi * static_cast<double>(j) /
                                                     static_cast<double>(opts.count);
        set.params(j, 0) = theta;
        local(j, 0) = std::cos(theta);
        local(j, 1) = -std::sin(theta);
        local(j, 2) = std::sin(theta);
        local(j, 3) = std::cos(theta);
    }
    set.embeddingSeed = deriveSeed(seed, kEmbedding);
    set.embedding = randomOrthogonal(opts.dim, *set.embeddingSeed);
    // Points are rows, so P = A p_hat becomes rows * A^t.
    Matrix clean = local * set.embedding->transpose();
    finish(set, std::move(clean), noise);
    return set;
}

std::pair<std::size_t, std::size_t> gridShape(std::size_t count, double tSpan, double uSpan) {
    std::pair<std::size_t, std::size_t> best{1, count};
    double bestScore = std::numeric_limits<double>::infinity();
    const double target = std::log(tSpan / uSpan);
    for (std::size_t nt = 1; nt <= count; ++nt) {
        if (count % nt != 0) {
            continue;
        }
        const std::size_t nu = count / nt;
        const double score = std::abs(std::log(static_cast<double>(nt) / static_cast<double>(nu)) - target);
        if (score < bestScore) {
            bestScore = score;
            best = {nt, nu};
        }
    }
    return best;
}

GeneratedSet genCylinder2D(const Cylinder2DOptions& opts, const Noise& noise, std::uint64_t seed) {
    requireCount(opts.count, "genCylinder2D");
    requireDim(opts.dim, 4, "genCylinder2D");
    GeneratedSet set;
    set.generator = "cyl2";
    set.function = TestFunction::Cylinder2D;
    set.seed = seed;
    set.paramNames = {"t", "u"};

    const auto [nt, nu] = gridShape(opts.count, opts.tMax - opts.tMin, opts.uMax - opts.uMin);
    const auto dim = static_cast<Eigen::Index>(opts.dim);
    Eigen::RowVectorXd v1 = Eigen::RowVectorXd::Ones(dim);
    Eigen::RowVectorXd v2 = Eigen::RowVectorXd::Zero(dim);
    Eigen::RowVectorXd v3 = Eigen::RowVectorXd::Zero(dim);
    v2(1) = 1.0;
    v2(2) = -1.0;
    v3(0) = 1.0;
    v3(3) = -1.0;

    auto step = [](double lo, double hi, std::size_t k, std::size_t n) {
        return n == 1 ? lo : lo + (hi - lo) * static_cast<double>(k) / static_cast<double>(n - 1);
    };
    const double scale = opts.radius / std::numbers::sqrt2;
    Matrix clean(static_cast<Eigen::Index>(opts.count), dim);
    set.params.resize(static_cast<Eigen::Index>(opts.count), 2);
    Eigen::Index j = 0;
    for (std::size_t a = 0; a < nt; ++a) {
        const double t = step(opts.tMin, opts.tMax, a, nt);
        for (std::size_t b = 0; b < nu; ++b, ++j) {
            const double u = step(opts.uMin, opts.uMax, b, nu);
            set.params(j, 0) = t;
            set.params(j, 1) = u;
            clean.row(j) = t * v1 + scale * (std::cos(u) * v2 + std::sin(u) * v3);
        }
    }
    finish(set, std::move(clean), noise);
    return set;
}

Eigen::RowVectorXd sphereCoordinates(const RowRef& angles, double radius) {
    const auto d = angles.size() + 1;
    Eigen::RowVectorXd x(d);
    double sines = radius;
    for (Eigen::Index k = 0; k < angles.size(); ++k) {
        x(k) = sines * std::cos(angles(k));
        sines *= std::sin(angles(k));
    }
    x(d - 1) = sines;
    return x;
}

GeneratedSet genCylinderD(const CylinderDOptions& opts, const Noise& noise, std::uint64_t seed) {
    requireCount(opts.count, "genCylinderD");
    if (opts.sphereDim < 2) {
        throw InvalidInput("genCylinderD: sphere dimension d must be >= 2");
    }
    requireDim(opts.dim, opts.sphereDim + 1, "genCylinderD");
    GeneratedSet set;
    set.generator = "cyl6";
    set.function = TestFunction::AngleSum;
    set.seed = seed;
    const auto angles = static_cast<Eigen::Index>(opts.sphereDim - 1);
    set.paramNames = {"t"};
    for (Eigen::Index k = 0; k < angles; ++k) {
        set.paramNames.push_back("u" + std::to_string(k + 1));
    }

    const auto rows = static_cast<Eigen::Index>(opts.count);
    const auto dim = static_cast<Eigen::Index>(opts.dim);
    const auto d = static_cast<Eigen::Index>(opts.sphereDim);
    Eigen::RowVectorXd v0 = Eigen::RowVectorXd::Zero(dim);
    v0.head(d + 1).setOnes();

    Rng rng(deriveSeed(seed, kParams));
    set.params.resize(rows, angles + 1);
    Matrix clean = Matrix::Zero(rows, dim);
    const double r2 = opts.radius * opts.radius;
    for (Eigen::Index j = 0; j < rows; ++j) {
        const double t = rng.uniform(opts.tMin, opts.tMax);
        set.params(j, 0) = t;
        for (Eigen::Index k = 0; k < angles; ++k) {
            set.params(j, k + 1) = rng.uniform(opts.uMin, opts.uMax);
        }
        clean.row(j) = t * v0;
        clean.row(j).head(d) += r2 * sphereCoordinates(set.params.row(j).tail(angles), opts.radius);
    }
    finish(set, std::move(clean), noise);
    return set;
}

GeneratedSet genSwissRoll(const SwissRollOptions& opts, const Noise& noise, std::uint64_t seed) {
    requireCount(opts.count, "genSwissRoll");
    requireDim(opts.dim, 3, "genSwissRoll");
    GeneratedSet set;
    set.generator = "swiss";
    set.function = TestFunction::SwissT;
    set.seed = seed;
    set.paramNames = {"t", "y"};

    const auto rows = static_cast<Eigen::Index>(opts.count);
    Rng rng(deriveSeed(seed, kParams));
    set.params.resize(rows, 2);
    Matrix clean = Matrix::Zero(rows, static_cast<Eigen::Index>(opts.dim));
    for (Eigen::Index j = 0; j < rows; ++j) {
        const double t = 8.0 * static_cast<double>(j) / static_cast<double>(opts.count) + 2.0;
        const double y = rng.uniform(-6.0, 6.0);
        set.params(j, 0) = t;
        set.params(j, 1) = y;
        clean(j, 0) = t * std::sin(t) / 10.0;
        clean(j, 1) = y / 10.0;
        clean(j, 2) = t * std::cos(t) / 10.0;
    }
    finish(set, std::move(clean), noise);
    return set;
}

} // namespace mfa::datasets
