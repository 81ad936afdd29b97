// Command-line front end: generate data sets, denoise them, evaluate RBF
// approximants and run the benchmark presets.

#include "mfa/harness.hpp"
#include "mfa/io.hpp"
#include "mfa/log.hpp"
#include "mfa/pipeline.hpp"
#include "mfa/rng.hpp"

#include <CLI11.hpp>

#include <filesystem>
#include <iostream>

namespace fs = std::filesystem;
using namespace mfa;

namespace {

harness::Generator generatorForPreset(const std::string& name) {
    if (name == "o2") return harness::Generator::O2;
    if (name == "cyl2") return harness::Generator::Cylinder2D;
    if (name == "cyl6") return harness::Generator::CylinderD;
    return harness::Generator::SwissRoll;
}

int runGenerate(const std::string& presetName, double noise, std::uint64_t seed, const fs::path& out) {
    harness::ExperimentConfig cfg;
    switch (generatorForPreset(presetName)) {
    case harness::Generator::O2: cfg = harness::preset("o2-smooth"); break;
    case harness::Generator::Cylinder2D: cfg = harness::preset("cyl2"); break;
    case harness::Generator::CylinderD: cfg = harness::preset("cyl6"); break;
    case harness::Generator::SwissRoll: cfg = harness::preset("swiss-noise"); break;
    }
    const auto set = harness::generate(cfg, {noise, noise}, seed);

    fs::create_directories(out);
    io::writeCsv(out / "points.csv", io::columnNames("x", set.noisyPoints.dim()), set.noisyPoints.matrix());
    io::writeCsv(out / "values.csv", io::columnNames("f", set.noisyValues.codim()), set.noisyValues.values);
    io::writeCsv(out / "clean_points.csv", io::columnNames("x", set.cleanPoints.dim()), set.cleanPoints.matrix());
    io::writeCsv(out / "clean_values.csv", io::columnNames("f", set.cleanValues.codim()), set.cleanValues.values);
    io::writeCsv(out / "params.csv", set.paramNames, set.params);
    nlohmann::json manifest = {{"generator", set.generator},
                               {"function", datasets::toString(set.function)},
                               {"count", set.cleanPoints.size()},
                               {"dim", set.cleanPoints.dim()},
                               {"noise", {{"domain", set.noise.domain}, {"codomain", set.noise.codomain}}},
                               {"seed", seed}};
    if (set.embedding) {
        io::writeCsv(out / "embedding.csv", io::columnNames("a", static_cast<std::size_t>(set.embedding->cols())),
                     *set.embedding);
    }
    io::writeJson(out / "manifest.json", manifest);
    return 0;
}

int runDenoise(const fs::path& in, std::size_t qSize, int iters, std::size_t sketchDim, std::uint64_t seed,
               const fs::path& out) {
    const auto [points, values] = io::readPointsAndValues(in);
    pipeline::DenoiseConfig cfg;
    cfg.qSize = qSize;
    cfg.initSeed = deriveSeed(seed, 1);
    cfg.mlop.maxIters = iters;
    cfg.mlop.seed = deriveSeed(seed, 2);
    cfg.mlop.useSketch = sketchDim > 0;
    cfg.mlop.sketchDim = sketchDim;
    const auto graph = pipeline::denoiseGraph(points, values, cfg);
    io::writeDenoisedGraph(out, graph);
    return 0;
}

int runApprox(const std::string& model, const fs::path& centersDir, const fs::path& pointsFile, double h,
              const fs::path& out) {
    const auto [centers, values] = io::readPointsAndValues(centersDir);
    const PointCloud z(io::readCsv(pointsFile));
    const auto evaluator = pipeline::evaluatorFromString(model);
    const auto result = pipeline::approximateAt(centers, values, z, evaluator,
                                                h > 0.0 ? std::optional<double>(h) : std::nullopt);
    io::writeCsv(out, io::columnNames("f", result.codim()), result.values);
    return 0;
}

int runExperimentCommand(const std::string& presetName, const std::string& configFile, std::uint64_t seed,
                         bool seedGiven, const fs::path& out) {
    harness::ExperimentConfig cfg;
    if (!configFile.empty()) {
        cfg = harness::experimentConfigFromJson(io::readJson(configFile));
    } else {
        cfg = harness::preset(presetName);
    }
    if (seedGiven || configFile.empty()) {
        cfg.seed = seed;
    }
    const auto result = harness::runExperiment(cfg);
    harness::writeExperiment(out, result);
    for (const auto& row : result.rows) {
        std::cout << row.scenario << "  " << row.evaluator << "  ";
        if (row.ok) {
            std::cout << "maxRel=" << row.report.maxRelative << " rmse=" << row.report.rmse << '\n';
        } else {
            std::cout << "failed: " << row.error << '\n';
        }
    }
    return 0;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Denoising and function approximation on noisy manifold samples"};
    app.require_subcommand(1);
    bool quiet = false;
    app.add_flag("-q,--quiet", quiet, "Suppress warnings");

    std::string genPreset;
    double genNoise = 0.0;
    std::uint64_t genSeed = 1;
    fs::path genOut;
    auto* gen = app.add_subcommand("generate", "Write a synthetic data set");
    gen->add_option("--preset", genPreset, "Data set")->required()->check(CLI::IsMember({"o2", "cyl2", "cyl6", "swiss"}));
    gen->add_option("--noise", genNoise, "Uniform noise amplitude for points and values")->check(CLI::NonNegativeNumber);
    gen->add_option("--seed", genSeed, "Master seed");
    gen->add_option("--out", genOut, "Output directory")->required();

    fs::path denIn, denOut;
    std::size_t denQ = 0;
    int denIters = 100;
    std::size_t denSketch = 0;
    std::uint64_t denSeed = 1;
    auto* den = app.add_subcommand("denoise", "Run MLOP on the graph of a sampled function");
    den->add_option("--in", denIn, "Directory with points.csv and values.csv")->required()->check(CLI::ExistingDirectory);
    den->add_option("--qsize", denQ, "Number of output points")->required();
    den->add_option("--iters", denIters, "Iterations")->check(CLI::NonNegativeNumber);
    den->add_option("--sketch-dim", denSketch, "Sketch dimension; 0 uses exact distances");
    den->add_option("--seed", denSeed, "Master seed");
    den->add_option("--out", denOut, "Output directory")->required();

    std::string apModel;
    fs::path apCenters, apPoints, apOut;
    double apH = 0.0;
    auto* ap = app.add_subcommand("approx", "Evaluate an approximant at new points");
    ap->add_option("--model", apModel, "Evaluator")->required()->check(CLI::IsMember({"phi1", "phi2", "phi3", "wavg"}));
    ap->add_option("--centers", apCenters, "Directory with points.csv and values.csv")->required()->check(CLI::ExistingDirectory);
    ap->add_option("--points", apPoints, "CSV of evaluation points")->required()->check(CLI::ExistingFile);
    ap->add_option("--width", apH, "Kernel width; defaults from the centers");
    ap->add_option("--out", apOut, "Output CSV")->required();

    std::string exPreset = "o2-smooth", exConfig;
    std::uint64_t exSeed = 1;
    fs::path exOut;
    auto* ex = app.add_subcommand("experiment", "Run a benchmark preset");
    ex->add_option("--preset", exPreset, "Preset")
        ->check(CLI::IsMember({"o2-smooth", "o2-nonsmooth", "cyl2", "cyl6", "swiss-noise"}));
    ex->add_option("--config", exConfig, "JSON experiment config (overrides --preset)")->check(CLI::ExistingFile);
    auto* exSeedOpt = ex->add_option("--seed", exSeed, "Master seed");
    ex->add_option("--out", exOut, "Output directory")->required();

    CLI11_PARSE(app, argc, argv);
    log::setWarningsEnabled(!quiet);

    try {
        if (gen->parsed()) return runGenerate(genPreset, genNoise, genSeed, genOut);
        if (den->parsed()) return runDenoise(denIn, denQ, denIters, denSketch, denSeed, denOut);
        if (ap->parsed()) return runApprox(apModel, apCenters, apPoints, apH, apOut);
        if (ex->parsed()) return runExperimentCommand(exPreset, exConfig, exSeed, exSeedOpt->count() > 0, exOut);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    }
    return 0;
}
