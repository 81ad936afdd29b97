#pragma once

#include "mfa/geometry.hpp"
#include "mfa/mlop.hpp"
#include "mfa/rbf.hpp"
#include "mfa/types.hpp"

#include <optional>
#include <string>

namespace mfa::pipeline {

/// Points of the graph of f in R^{n+s}, with f scaled so its largest magnitude
/// matches the largest point coordinate.
struct EmbeddedGraph {
    PointCloud points;
    double normFactor = 1.0;
    std::size_t domainDim = 0;
    std::size_t codim = 0;
};

/// normFactor = max|P| / max|F| (1 when F vanishes); p_hat = [p, normFactor * f(p)].
EmbeddedGraph embedGraph(const PointCloud& points, const FunctionSamples& values);

/// Inverse of embedGraph: first n columns are the points, the remaining ones
/// divided by normFactor are the values (returned with normFactor 1).
std::pair<PointCloud, FunctionSamples> splitGraph(const PointCloud& embedded, std::size_t domainDim,
                                                  double normFactor);

struct DenoiseConfig {
    std::size_t qSize = 0;
    /// h1 / h2 of zero are filled in from the support-size rule on the embedded clouds.
    mlop::MlopConfig mlop;
    /// Seed for drawing Q^(0) from P; the MLOP seed stays in `mlop.seed`.
    std::uint64_t initSeed = 0;
};

struct DenoisedGraph {
    PointCloud q;
    FunctionSamples fTilde;
    /// The initial sample (Q^(0), f(Q^(0))) the iteration started from.
    PointCloud q0;
    FunctionSamples f0;
    double normFactor = 1.0;
    geometry::SupportSizes support;
    mlop::MlopConfig effectiveConfig;
    mlop::MlopResult run;
};

DenoisedGraph denoiseGraph(const PointCloud& points, const FunctionSamples& values, const DenoiseConfig& cfg);

/// How the function is evaluated at new points.
enum class Evaluator { Phi1, Phi2, Phi3, WeightedAverage };

std::string toString(Evaluator evaluator);
Evaluator evaluatorFromString(const std::string& name);

/// Default widths: the repulsion support 2*sqrt(2)*h0 of the centers for the
/// kernels, and the plain fill distance h0 for the weighted average.
double defaultWidth(const PointCloud& centers, Evaluator evaluator);

/// Fits on (centers, values) and evaluates at every z. `h` defaults per defaultWidth.
FunctionSamples approximateAt(const PointCloud& centers, const FunctionSamples& values, const PointCloud& z,
                              Evaluator evaluator, std::optional<double> h = std::nullopt);
FunctionSamples approximateAt(const DenoisedGraph& graph, const PointCloud& z, Evaluator evaluator,
                              std::optional<double> h = std::nullopt);

struct Approximation {
    DenoisedGraph graph;
    FunctionSamples valuesAtZ;
};

Approximation approximateFunction(const PointCloud& points, const FunctionSamples& values,
                                  const PointCloud& z, const DenoiseConfig& cfg, Evaluator evaluator);

} // namespace mfa::pipeline
