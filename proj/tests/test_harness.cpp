#include "mfa/harness.hpp"
#include "mfa/io.hpp"

#include "support.hpp"

#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>

using namespace mfa;
using namespace mfa::harness;
namespace fs = std::filesystem;

namespace {

harness::ExperimentConfig smallConfig() {
    auto cfg = preset("o2-smooth");
    cfg.count = 120;
    cfg.dim = 8;
    cfg.qSize = 20;
    cfg.maxIters = 3;
    cfg.numNewPoints = 15;
    cfg.sketchDim = 5;
    return cfg;
}

fs::path scratchDir(const std::string& name) {
    auto dir = fs::temp_directory_path() / ("mfa_test_" + name);
    fs::remove_all(dir);
    return dir;
}

std::string slurp(const fs::path& path) {
    std::ifstream in(path);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

} // namespace

TEST_CASE("errorReport") {
    const auto ref = testing::randomCloud(40, 3, 1);
    const FunctionSamples refValues(testing::randomMatrix(40, 2, 2));

    SUBCASE("exact predictions") {
        const auto r = errorReport(refValues, ref, ref, refValues);
        CHECK(r.maxRelative == 0.0);
        CHECK(r.rmse == 0.0);
        CHECK(r.variance == 0.0);
    }

    SUBCASE("single point") {
        Matrix p(1, 1), v(1, 1), pred(1, 1);
        p << 0.0;
        v << 1.0;
        pred << 1.2;
        const auto r = errorReport(FunctionSamples(pred), PointCloud(p), PointCloud(p), FunctionSamples(v));
        CHECK(r.maxRelative == doctest::Approx(0.2));
        CHECK(r.rmse == doctest::Approx(0.2));
        CHECK(r.variance == 0.0);
        CHECK(r.denominator == 1.0);
    }

    SUBCASE("independent recomputation on 100 points") {
        const auto z = testing::randomCloud(100, 3, 3);
        const FunctionSamples pred(testing::randomMatrix(100, 2, 4, 3.0));
        const auto r = errorReport(pred, z, ref, refValues);

        double denom = 0.0;
        for (Eigen::Index j = 0; j < 40; ++j) {
            denom = std::max(denom, std::abs(refValues.values(j, 0)) + std::abs(refValues.values(j, 1)));
        }
        std::vector<double> errs;
        for (Eigen::Index k = 0; k < 100; ++k) {
            Eigen::Index best = 0;
            for (Eigen::Index j = 1; j < 40; ++j) {
                if ((ref.matrix().row(j) - z.matrix().row(k)).norm() < (ref.matrix().row(best) - z.matrix().row(k)).norm()) {
                    best = j;
                }
            }
            errs.push_back(std::abs(pred.values(k, 0) - refValues.values(best, 0)) +
                           std::abs(pred.values(k, 1) - refValues.values(best, 1)));
        }
        double mx = 0.0, sum = 0.0, sq = 0.0;
        for (double e : errs) {
            mx = std::max(mx, e);
            sum += e;
            sq += e * e;
        }
        const double mean = sum / 100.0;
        double var = 0.0;
        for (double e : errs) var += (e - mean) * (e - mean);
        var /= 99.0;

        CHECK(r.denominator == doctest::Approx(denom).epsilon(1e-15));
        CHECK(r.maxRelative == doctest::Approx(mx / denom).epsilon(1e-14));
        CHECK(r.rmse == doctest::Approx(std::sqrt(sq / 100.0)).epsilon(1e-14));
        CHECK(r.variance == doctest::Approx(var).epsilon(1e-12));
        CHECK(r.maxRelative > 1.0);

        // Reversing the evaluation order changes nothing.
        const PointCloud zr(Matrix(z.matrix().colwise().reverse()));
        const FunctionSamples pr(Matrix(pred.values.colwise().reverse()));
        const auto rr = errorReport(pr, zr, ref, refValues);
        CHECK(rr.maxRelative == r.maxRelative);
        CHECK(rr.rmse == doctest::Approx(r.rmse).epsilon(1e-15));
    }

    CHECK_THROWS_AS(errorReport(refValues, ref, PointCloud(), FunctionSamples()), InvalidInput);
}

TEST_CASE("presets") {
    for (const auto& name : presetNames()) {
        const auto cfg = preset(name);
        CHECK(cfg.preset == name);
        CHECK_NOTHROW(cfg.validate());
    }
    const auto o2 = preset("o2-smooth");
    CHECK(o2.count == 500);
    CHECK(o2.qSize == 55);
    CHECK(o2.maxIters == 150);
    const auto swiss = preset("swiss-noise");
    CHECK(swiss.noiseLevels.size() == 4);
    CHECK(preset("cyl6").qSize == 460);
    CHECK_THROWS_AS(preset("torus"), InvalidInput);
}

TEST_CASE("experiment config JSON") {
    const auto cfg = smallConfig();
    const auto back = experimentConfigFromJson(toJson(cfg));
    CHECK(toJson(back) == toJson(cfg));

    nlohmann::json partial = {{"preset", "cyl2"}, {"maxIters", 7}};
    const auto fromPreset = experimentConfigFromJson(partial);
    CHECK(fromPreset.maxIters == 7);
    CHECK(fromPreset.qSize == preset("cyl2").qSize);

    CHECK_THROWS_AS(experimentConfigFromJson({{"preset", "cyl2"}, {"iterations", 7}}), InvalidInput);
    CHECK_THROWS_AS(experimentConfigFromJson({{"noiseLevels", {{{"domain", 0.1}, {"amplitude", 0.2}}}}}),
                    InvalidInput);
    CHECK_THROWS_AS(experimentConfigFromJson({{"cleanKernels", {"phi9"}}}), InvalidInput);
}

TEST_CASE("runExperiment row structure and determinism") {
    const auto cfg = smallConfig();
    const auto a = runExperiment(cfg);
    const auto b = runExperiment(cfg);
    REQUIRE(a.rows.size() == 8);
    const std::vector<std::string> expected{"f(Q^0)",     "f(Q^3)",     "phi1@noisy", "phi1@clean",
                                            "phi2@clean", "phi3@clean", "wavg@noisy", "wavg@clean"};
    for (std::size_t i = 0; i < a.rows.size(); ++i) {
        CHECK(a.rows[i].evaluator == expected[i]);
        CHECK(a.rows[i].scenario == "o2-smooth");
        CHECK(a.rows[i].ok);
        CHECK(a.rows[i].report.maxRelative == b.rows[i].report.maxRelative);
        CHECK(a.rows[i].report.rmse == b.rows[i].report.rmse);
    }
    CHECK(a.row("o2-smooth", "phi2@clean").report.rmse == a.rows[4].report.rmse);
    REQUIRE(a.scenarios.size() == 1);
    CHECK(a.scenarios[0].graph.q.size() == 20);

    SUBCASE("one scenario per noise level") {
        auto multi = cfg;
        multi.noiseLevels = {{0.05, 0.05}, {0.1, 0.1}};
        multi.cleanKernels = {rbf::Kernel::Phi1};
        multi.weightedAverage = false;
        const auto r = runExperiment(multi);
        CHECK(r.rows.size() == 8);
        CHECK(r.scenarios.size() == 2);
        CHECK(r.rows.front().scenario != r.rows.back().scenario);
    }

    auto invalid = cfg;
    invalid.numNewPoints = 100000;
    CHECK_THROWS_AS(runExperiment(invalid), InvalidInput);
}

TEST_CASE("experiment output files") {
    const auto result = runExperiment(smallConfig());
    const auto dir = scratchDir("experiment");
    writeExperiment(dir, result);
    const auto csv = slurp(dir / "results.csv");
    CHECK(csv.rfind("scenario,evaluator,maxRelative,rmse,variance,denominator,seed\n", 0) == 0);
    CHECK(std::count(csv.begin(), csv.end(), '\n') == 9);

    const auto report = io::readJson(dir / "report.json");
    CHECK(report.at("rows").size() == 8);
    CHECK(report.at("config").at("preset") == "o2-smooth");
    CHECK(report.at("scenarios").at(0).contains("h1"));

    for (const char* part : {"reference", "noisy", "q0", "qfinal"}) {
        const auto path = dir / "plotdata" / (std::string("o2-smooth_") + part + ".csv");
        REQUIRE(fs::exists(path));
        const Matrix m = io::readCsv(path);
        CHECK(m.cols() == 4);
    }
    // O(2) plot coordinates are the unembedded ones: the clean reference satisfies x1 = cos, x2 = -sin, x3 = sin.
    const Matrix refPlot = io::readCsv(dir / "plotdata" / "o2-smooth_reference.csv");
    CHECK(std::abs(refPlot(0, 1) + refPlot(0, 2)) < 1e-12);
    fs::remove_all(dir);
}

TEST_CASE("CSV and graph I/O") {
    const auto dir = scratchDir("io");
    const Matrix m = testing::randomMatrix(5, 3, 1, 1e3);
    io::writeCsv(dir / "m.csv", io::columnNames("x", 3), m);
    CHECK(io::readCsv(dir / "m.csv") == m);
    CHECK(io::columnNames("f", 2) == std::vector<std::string>{"f1", "f2"});

    {
        std::ofstream bad(dir / "bad.csv");
        bad << "a,b\n1,2\n3\n";
    }
    CHECK_THROWS_AS(io::readCsv(dir / "bad.csv"), InvalidInput);
    {
        std::ofstream text(dir / "text.csv");
        text << "a,b\n1,2\nx,4\n";
    }
    CHECK_THROWS_AS(io::readCsv(dir / "text.csv"), InvalidInput);
    CHECK_THROWS_AS(io::readCsv(dir / "missing.csv"), InvalidInput);

    mlop::MlopConfig cfg;
    cfg.h1 = 0.3;
    cfg.h2 = 0.4;
    cfg.gamma0 = 0.01;
    cfg.useSketch = true;
    const auto back = io::mlopConfigFromJson(io::toJson(cfg));
    CHECK(io::toJson(back) == io::toJson(cfg));
    CHECK_THROWS_AS(io::mlopConfigFromJson({{"h1", 1.0}, {"stepSize", 2.0}}), InvalidInput);

    pipeline::DenoisedGraph graph;
    graph.q = testing::randomCloud(4, 2, 5);
    graph.fTilde = FunctionSamples(testing::randomMatrix(4, 1, 6));
    graph.normFactor = 2.5;
    graph.effectiveConfig = cfg;
    io::writeDenoisedGraph(dir / "graph", graph);
    const auto [points, values] = io::readPointsAndValues(dir / "graph");
    CHECK(points.matrix() == graph.q.matrix());
    CHECK(values.values == graph.fTilde.values);
    const auto manifest = io::readJson(dir / "graph" / "manifest.json");
    CHECK(manifest.at("normFactor") == 2.5);
    CHECK(manifest.contains("config"));
    CHECK(manifest.contains("seed"));
    fs::remove_all(dir);
}
