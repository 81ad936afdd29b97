#include "mfa/pipeline.hpp"

#include <cmath>

namespace mfa::pipeline {

EmbeddedGraph embedGraph(const PointCloud& points, const FunctionSamples& values) {
    if (points.empty() || values.size() == 0) {
        throw InvalidInput("embedGraph: empty input");
    }
    if (points.size() != values.size()) {
        throw InvalidInput("embedGraph: " + std::to_string(points.size()) + " points but " +
                           std::to_string(values.size()) + " values");
    }
    const double maxPoint = points.matrix().cwiseAbs().maxCoeff();
    const double maxValue = values.values.cwiseAbs().maxCoeff();
    double factor = 1.0;
    if (maxValue > 0.0 && maxPoint > 0.0) {
        factor = maxPoint / maxValue;
    }
    const auto n = points.matrix().cols();
    const auto s = values.values.cols();
    Matrix joined(points.matrix().rows(), n + s);
    joined.leftCols(n) = points.matrix();
    joined.rightCols(s) = factor * values.values;
    return {PointCloud(std::move(joined)), factor, static_cast<std::size_t>(n), static_cast<std::size_t>(s)};
}

std::pair<PointCloud, FunctionSamples> splitGraph(const PointCloud& embedded, std::size_t domainDim,
                                                  double normFactor) {
    if (domainDim < 1 || domainDim >= embedded.dim()) {
        throw InvalidInput("splitGraph: domain dimension must lie in [1, total dimension)");
    }
    if (!(normFactor > 0.0)) {
        throw InvalidInput("splitGraph: normalization factor must be positive");
    }
    const auto n = static_cast<Eigen::Index>(domainDim);
    const auto s = embedded.matrix().cols() - n;
    return {PointCloud(Matrix(embedded.matrix().leftCols(n))),
            FunctionSamples(Matrix(embedded.matrix().rightCols(s) / normFactor))};
}

DenoisedGraph denoiseGraph(const PointCloud& points, const FunctionSamples& values, const DenoiseConfig& cfg) {
    const auto graph = embedGraph(points, values);
    const auto q0 = mlop::initQ(graph.points, cfg.qSize, cfg.initSeed);

    DenoisedGraph out;
    out.normFactor = graph.normFactor;
    out.effectiveConfig = cfg.mlop;
    if (cfg.mlop.h1 > 0.0 && cfg.mlop.h2 > 0.0) {
        out.support.h1 = cfg.mlop.h1;
        out.support.h2 = cfg.mlop.h2;
    } else {
        out.support = geometry::supportSizes(
            graph.points, q0, cfg.mlop.h2 > 0.0 ? std::optional<double>(cfg.mlop.h2) : std::nullopt);
        if (cfg.mlop.h1 > 0.0) {
            out.support.h1 = cfg.mlop.h1;
        }
        out.effectiveConfig.h1 = out.support.h1;
        out.effectiveConfig.h2 = out.support.h2;
    }

    out.run = mlop::runMlop(graph.points, q0, out.effectiveConfig);
    std::tie(out.q, out.fTilde) = splitGraph(out.run.q, graph.domainDim, graph.normFactor);
    std::tie(out.q0, out.f0) = splitGraph(q0, graph.domainDim, graph.normFactor);
    return out;
}

std::string toString(Evaluator evaluator) {
    switch (evaluator) {
    case Evaluator::Phi1: return "phi1";
    case Evaluator::Phi2: return "phi2";
    case Evaluator::Phi3: return "phi3";
    case Evaluator::WeightedAverage: return "wavg";
    }
    return "unknown";
}

Evaluator evaluatorFromString(const std::string& name) {
    if (name == "phi1") return Evaluator::Phi1;
    if (name == "phi2") return Evaluator::Phi2;
    if (name == "phi3") return Evaluator::Phi3;
    if (name == "wavg") return Evaluator::WeightedAverage;
    throw InvalidInput("unknown evaluator '" + name + "' (expected phi1, phi2, phi3 or wavg)");
}

double defaultWidth(const PointCloud& centers, Evaluator evaluator) {
    if (centers.size() < 2) {
        throw InvalidInput("default RBF width needs at least two centers");
    }
    if (evaluator == Evaluator::WeightedAverage) {
        return geometry::fillDistance(centers);
    }
    return geometry::kSupportFactor * geometry::neighborhoodRadius(centers, centers, 1).h0Hat;
}

FunctionSamples approximateAt(const PointCloud& centers, const FunctionSamples& values, const PointCloud& z,
                              Evaluator evaluator, std::optional<double> h) {
    if (z.dim() != centers.dim()) {
        throw InvalidInput("approximateAt: evaluation points have dimension " + std::to_string(z.dim()) +
                           ", centers have " + std::to_string(centers.dim()));
    }
    const double width = h.value_or(defaultWidth(centers, evaluator));
    const FunctionSamples natural(values.values / values.normFactor);
    switch (evaluator) {
    case Evaluator::WeightedAverage:
        return FunctionSamples(rbf::weightedAverage(z, centers, natural, width));
    case Evaluator::Phi1:
    case Evaluator::Phi2:
    case Evaluator::Phi3: {
        const auto kernel = evaluator == Evaluator::Phi1   ? rbf::Kernel::Phi1
                            : evaluator == Evaluator::Phi2 ? rbf::Kernel::Phi2
                                                           : rbf::Kernel::Phi3;
        const auto model = rbf::fitRbf(centers, natural, kernel, width);
        return FunctionSamples(rbf::evalRbf(model, z));
    }
    }
    throw InvalidInput("approximateAt: unknown evaluator");
}

FunctionSamples approximateAt(const DenoisedGraph& graph, const PointCloud& z, Evaluator evaluator,
                              std::optional<double> h) {
    return approximateAt(graph.q, graph.fTilde, z, evaluator, h);
}

Approximation approximateFunction(const PointCloud& points, const FunctionSamples& values, const PointCloud& z,
                                  const DenoiseConfig& cfg, Evaluator evaluator) {
    Approximation out;
    out.graph = denoiseGraph(points, values, cfg);
    out.valuesAtZ = approximateAt(out.graph, z, evaluator);
    return out;
}

} // namespace mfa::pipeline
