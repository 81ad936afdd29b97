#pragma once

#include "mfa/datasets.hpp"
#include "mfa/pipeline.hpp"
#include "mfa/types.hpp"

#include <json.hpp>

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

namespace mfa::harness {

struct ErrorReport {
    double maxRelative = 0.0;
    double rmse = 0.0;
    double variance = 0.0;
    /// max over the reference set of |f(r)|_1; maxRelative = max error / denominator.
    double denominator = 0.0;
    std::vector<double> perPoint;
};

/// e_k = |predicted_k - f(r_k)|_1 where r_k is the reference point nearest to
/// evalPoints_k. Variance is the sample (n - 1) variance, 0 for one point.
ErrorReport errorReport(const FunctionSamples& predicted, const PointCloud& evalPoints,
                        const PointCloud& refPoints, const FunctionSamples& refValues);

enum class Generator { O2, Cylinder2D, CylinderD, SwissRoll };

std::string toString(Generator generator);

struct ExperimentConfig {
    std::string preset;
    Generator generator = Generator::O2;
    datasets::TestFunction function = datasets::TestFunction::O2Smooth;
    std::size_t count = 500;
    std::size_t dim = 60;
    /// One scenario per entry.
    std::vector<datasets::Noise> noiseLevels{{0.1, 0.1}};
    std::size_t qSize = 55;
    int maxIters = 150;
    double eps = 0.1;
    bool useSketch = true;
    std::size_t sketchDim = 0;
    std::vector<rbf::Kernel> noisyKernels{rbf::Kernel::Phi1};
    std::vector<rbf::Kernel> cleanKernels{rbf::Kernel::Phi1, rbf::Kernel::Phi2, rbf::Kernel::Phi3};
    bool weightedAverage = true;
    std::size_t numNewPoints = 100;
    std::uint64_t seed = 1;

    void validate() const;
};

ExperimentConfig preset(const std::string& name);
std::vector<std::string> presetNames();

nlohmann::json toJson(const ExperimentConfig& cfg);
/// Starts from the named preset (key "preset") or from defaults; unknown keys are rejected.
ExperimentConfig experimentConfigFromJson(const nlohmann::json& doc);

struct ResultRow {
    std::string scenario;
    std::string evaluator;
    ErrorReport report;
    bool ok = true;
    std::string error;
};

/// Per-scenario by-products kept for plotting and diagnostics.
struct ScenarioData {
    std::string scenario;
    datasets::Noise noise;
    geometry::SupportSizes support;
    double nnStdInitial = 0.0;
    double nnStdFinal = 0.0;
    datasets::GeneratedSet data;
    pipeline::DenoisedGraph graph;
};

struct ExperimentResult {
    ExperimentConfig config;
    std::vector<ResultRow> rows;
    std::vector<ScenarioData> scenarios;

    const ResultRow& row(const std::string& scenario, const std::string& evaluator) const;
};

/// Row labels, in table order.
std::string qRowLabel(int iterations);
std::string evaluatorLabel(const std::string& kind, bool cleanCenters);

datasets::GeneratedSet generate(const ExperimentConfig& cfg, const datasets::Noise& noise, std::uint64_t seed);

ExperimentResult runExperiment(const ExperimentConfig& cfg);

/// Standard deviation of nearest-neighbor distances within a cloud.
double nearestNeighborSpread(const PointCloud& cloud);

void writeResultsCsv(const std::filesystem::path& path, const ExperimentResult& result);
nlohmann::json toJson(const ExperimentResult& result);
/// First-k coordinates (O(2): after undoing the embedding) of the noisy cloud,
/// Q^(0) and Q^(k), each with its function values.
void writePlotData(const std::filesystem::path& dir, const ExperimentResult& result, std::size_t k = 3);
/// results.csv, report.json and plotdata/.
void writeExperiment(const std::filesystem::path& dir, const ExperimentResult& result);

} // namespace mfa::harness
