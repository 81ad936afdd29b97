#include "mfa/harness.hpp"

#include "mfa/geometry.hpp"
#include "mfa/io.hpp"
#include "mfa/rng.hpp"

#include <cmath>
#include <fstream>
#include <iomanip>
#include <limits>
#include <sstream>

namespace mfa::harness {

namespace fs = std::filesystem;

namespace {

enum Stream : std::uint64_t { kData = 100, kInit = 200, kMlop = 300, kNewPoints = 400 };

std::string formatAmplitude(double a) {
    std::ostringstream s;
    s << a;
    return s.str();
}

std::string scenarioName(const ExperimentConfig& cfg, const datasets::Noise& noise) {
    if (cfg.noiseLevels.size() == 1) {
        return cfg.preset.empty() ? toString(cfg.generator) : cfg.preset;
    }
    return (cfg.preset.empty() ? toString(cfg.generator) : cfg.preset) + "@" + formatAmplitude(noise.codomain);
}

PointCloud selectRows(const PointCloud& cloud, const std::vector<std::size_t>& idx) {
    Matrix out(static_cast<Eigen::Index>(idx.size()), static_cast<Eigen::Index>(cloud.dim()));
    for (std::size_t k = 0; k < idx.size(); ++k) {
        out.row(static_cast<Eigen::Index>(k)) = cloud.row(idx[k]);
    }
    return PointCloud(std::move(out));
}

pipeline::Evaluator evaluatorFor(rbf::Kernel kernel) {
    switch (kernel) {
    case rbf::Kernel::Phi1: return pipeline::Evaluator::Phi1;
    case rbf::Kernel::Phi2: return pipeline::Evaluator::Phi2;
    case rbf::Kernel::Phi3: return pipeline::Evaluator::Phi3;
    }
    return pipeline::Evaluator::Phi1;
}

std::vector<std::string> kernelNames(const std::vector<rbf::Kernel>& kernels) {
    std::vector<std::string> out;
    for (auto k : kernels) out.push_back(rbf::toString(k));
    return out;
}

std::vector<rbf::Kernel> kernelsFromJson(const nlohmann::json& doc) {
    std::vector<rbf::Kernel> out;
    for (const auto& k : doc) out.push_back(rbf::kernelFromString(k.get<std::string>()));
    return out;
}

Generator generatorFromString(const std::string& name) {
    if (name == "o2") return Generator::O2;
    if (name == "cyl2") return Generator::Cylinder2D;
    if (name == "cyl6") return Generator::CylinderD;
    if (name == "swiss") return Generator::SwissRoll;
    throw InvalidInput("unknown generator '" + name + "'");
}

datasets::TestFunction functionFromString(const std::string& name) {
    using datasets::TestFunction;
    for (auto fn : {TestFunction::O2Smooth, TestFunction::O2NonSmooth, TestFunction::Cylinder2D,
                    TestFunction::AngleSum, TestFunction::SwissT}) {
        if (datasets::toString(fn) == name) return fn;
    }
    throw InvalidInput("unknown test function '" + name + "'");
}

nlohmann::json reportJson(const ErrorReport& r) {
    return {{"maxRelative", r.maxRelative}, {"rmse", r.rmse}, {"variance", r.variance},
            {"denominator", r.denominator}};
}

} // namespace

ErrorReport errorReport(const FunctionSamples& predicted, const PointCloud& evalPoints, const PointCloud& refPoints,
                        const FunctionSamples& refValues) {
    if (refPoints.empty() || refValues.size() == 0) {
        throw InvalidInput("errorReport: empty reference set");
    }
    if (refPoints.size() != refValues.size()) {
        throw InvalidInput("errorReport: reference points and values are not aligned");
    }
    if (predicted.size() != evalPoints.size() || predicted.size() == 0) {
        throw InvalidInput("errorReport: predictions and evaluation points must be aligned and non-empty");
    }
    if (predicted.codim() != refValues.codim()) {
        throw InvalidInput("errorReport: codomain dimension mismatch");
    }
    ErrorReport out;
    out.denominator = refValues.values.rowwise().lpNorm<1>().maxCoeff();
    out.perPoint.reserve(predicted.size());
    for (std::size_t k = 0; k < predicted.size(); ++k) {
        const auto nearest = geometry::nearestReference(evalPoints.row(k), refPoints);
        out.perPoint.push_back(
            (predicted.values.row(static_cast<Eigen::Index>(k)) - refValues.values.row(static_cast<Eigen::Index>(nearest)))
                .lpNorm<1>());
    }
    const auto n = static_cast<double>(out.perPoint.size());
    double maxErr = 0.0, sum = 0.0, sumSq = 0.0;
    for (double e : out.perPoint) {
        maxErr = std::max(maxErr, e);
        sum += e;
        sumSq += e * e;
    }
    out.maxRelative = out.denominator > 0.0 ? maxErr / out.denominator : maxErr;
    out.rmse = std::sqrt(sumSq / n);
    if (out.perPoint.size() > 1) {
        const double mean = sum / n;
        double acc = 0.0;
        for (double e : out.perPoint) acc += (e - mean) * (e - mean);
        out.variance = acc / (n - 1.0);
    }
    return out;
}

std::string toString(Generator generator) {
    switch (generator) {
    case Generator::O2: return "o2";
    case Generator::Cylinder2D: return "cyl2";
    case Generator::CylinderD: return "cyl6";
    case Generator::SwissRoll: return "swiss";
    }
    return "unknown";
}

void ExperimentConfig::validate() const {
    if (noiseLevels.empty()) {
        throw InvalidInput("experiment: at least one noise level is required");
    }
    if (qSize < 2 || qSize > count) {
        throw InvalidInput("experiment: need 2 <= qSize <= count");
    }
    if (maxIters < 0) {
        throw InvalidInput("experiment: maxIters must be >= 0");
    }
    if (numNewPoints < 1 || numNewPoints > count) {
        throw InvalidInput("experiment: need 1 <= numNewPoints <= count");
    }
    if (!(eps > 0.0)) {
        throw InvalidInput("experiment: eps must be > 0");
    }
}

ExperimentConfig preset(const std::string& name) {
    ExperimentConfig cfg;
    cfg.preset = name;
    if (name == "o2-smooth" || name == "o2-nonsmooth") {
        cfg.generator = Generator::O2;
        cfg.function = name == "o2-smooth" ? datasets::TestFunction::O2Smooth : datasets::TestFunction::O2NonSmooth;
        cfg.count = 500;
        cfg.noiseLevels = {{0.1, 0.1}};
        cfg.qSize = 55;
        cfg.maxIters = 150;
    } else if (name == "cyl2") {
        cfg.generator = Generator::Cylinder2D;
        cfg.function = datasets::TestFunction::Cylinder2D;
        cfg.count = 800;
        cfg.noiseLevels = {{0.1, 0.1}};
        cfg.qSize = 150;
        cfg.maxIters = 300;
    } else if (name == "cyl6") {
        cfg.generator = Generator::CylinderD;
        cfg.function = datasets::TestFunction::AngleSum;
        cfg.count = 1200;
        cfg.noiseLevels = {{0.2, 0.2}};
        cfg.qSize = 460;
        cfg.maxIters = 300;
    } else if (name == "swiss-noise") {
        cfg.generator = Generator::SwissRoll;
        cfg.function = datasets::TestFunction::SwissT;
        cfg.count = 800;
        // Amplitudes are in the units of the roll before its 1/10 scaling:
        // the values see a, the embedded points a/10.
        cfg.noiseLevels = {{0.01, 0.1}, {0.02, 0.2}, {0.05, 0.5}, {0.07, 0.7}};
        cfg.qSize = 200;
        cfg.maxIters = 300;
    } else {
        throw InvalidInput("unknown preset '" + name + "'");
    }
    return cfg;
}

std::vector<std::string> presetNames() {
    return {"o2-smooth", "o2-nonsmooth", "cyl2", "cyl6", "swiss-noise"};
}

nlohmann::json toJson(const ExperimentConfig& cfg) {
    auto levels = nlohmann::json::array();
    for (const auto& n : cfg.noiseLevels) {
        levels.push_back({{"domain", n.domain}, {"codomain", n.codomain}});
    }
    return {{"preset", cfg.preset},
            {"generator", toString(cfg.generator)},
            {"function", datasets::toString(cfg.function)},
            {"count", cfg.count},
            {"dim", cfg.dim},
            {"noiseLevels", levels},
            {"qSize", cfg.qSize},
            {"maxIters", cfg.maxIters},
            {"eps", cfg.eps},
            {"useSketch", cfg.useSketch},
            {"sketchDim", cfg.sketchDim},
            {"noisyKernels", kernelNames(cfg.noisyKernels)},
            {"cleanKernels", kernelNames(cfg.cleanKernels)},
            {"weightedAverage", cfg.weightedAverage},
            {"numNewPoints", cfg.numNewPoints},
            {"seed", cfg.seed}};
}

ExperimentConfig experimentConfigFromJson(const nlohmann::json& doc) {
    if (!doc.is_object()) {
        throw InvalidInput("experiment config must be a JSON object");
    }
    ExperimentConfig cfg;
    if (doc.contains("preset") && !doc.at("preset").get<std::string>().empty()) {
        cfg = preset(doc.at("preset").get<std::string>());
    }
    for (const auto& [key, value] : doc.items()) {
        if (key == "preset") continue;
        else if (key == "generator") cfg.generator = generatorFromString(value.get<std::string>());
        else if (key == "function") cfg.function = functionFromString(value.get<std::string>());
        else if (key == "count") cfg.count = value.get<std::size_t>();
        else if (key == "dim") cfg.dim = value.get<std::size_t>();
        else if (key == "noiseLevels") {
            cfg.noiseLevels.clear();
            for (const auto& level : value) {
                for (const auto& [k, _] : level.items()) {
                    if (k != "domain" && k != "codomain") {
                        throw InvalidInput("experiment config: unknown noise key '" + k + "'");
                    }
                }
                cfg.noiseLevels.push_back({level.value("domain", 0.0), level.value("codomain", 0.0)});
            }
        }
        else if (key == "qSize") cfg.qSize = value.get<std::size_t>();
        else if (key == "maxIters") cfg.maxIters = value.get<int>();
        else if (key == "eps") cfg.eps = value.get<double>();
        else if (key == "useSketch") cfg.useSketch = value.get<bool>();
        else if (key == "sketchDim") cfg.sketchDim = value.get<std::size_t>();
        else if (key == "noisyKernels") cfg.noisyKernels = kernelsFromJson(value);
        else if (key == "cleanKernels") cfg.cleanKernels = kernelsFromJson(value);
        else if (key == "weightedAverage") cfg.weightedAverage = value.get<bool>();
        else if (key == "numNewPoints") cfg.numNewPoints = value.get<std::size_t>();
        else if (key == "seed") cfg.seed = value.get<std::uint64_t>();
        else throw InvalidInput("experiment config: unknown key '" + key + "'");
    }
    cfg.validate();
    return cfg;
}

const ResultRow& ExperimentResult::row(const std::string& scenario, const std::string& evaluator) const {
    for (const auto& r : rows) {
        if (r.scenario == scenario && r.evaluator == evaluator) {
            return r;
        }
    }
    throw InvalidInput("no result row " + scenario + " / " + evaluator);
}

std::string qRowLabel(int iterations) {
    return "f(Q^" + std::to_string(iterations) + ")";
}

std::string evaluatorLabel(const std::string& kind, bool cleanCenters) {
    return kind + (cleanCenters ? "@clean" : "@noisy");
}

datasets::GeneratedSet generate(const ExperimentConfig& cfg, const datasets::Noise& noise, std::uint64_t seed) {
    switch (cfg.generator) {
    case Generator::O2: {
        datasets::O2Options o;
        o.count = cfg.count;
        o.dim = cfg.dim;
        o.function = cfg.function;
        return datasets::genO2(o, noise, seed);
    }
    case Generator::Cylinder2D: {
        datasets::Cylinder2DOptions o;
        o.count = cfg.count;
        o.dim = cfg.dim;
        return datasets::genCylinder2D(o, noise, seed);
    }
    case Generator::CylinderD: {
        datasets::CylinderDOptions o;
        o.count = cfg.count;
        o.dim = cfg.dim;
        return datasets::genCylinderD(o, noise, seed);
    }
    case Generator::SwissRoll: {
        datasets::SwissRollOptions o;
        o.count = cfg.count;
        o.dim = cfg.dim;
        return datasets::genSwissRoll(o, noise, seed);
    }
    }
    throw InvalidInput("unknown generator");
}

double nearestNeighborSpread(const PointCloud& cloud) {
    const auto d = geometry::nearestNeighborDistances(cloud);
    double mean = 0.0;
    for (double v : d) mean += v;
    mean /= static_cast<double>(d.size());
    double acc = 0.0;
    for (double v : d) acc += (v - mean) * (v - mean);
    return std::sqrt(acc / static_cast<double>(d.size()));
}

ExperimentResult runExperiment(const ExperimentConfig& cfg) {
    cfg.validate();
    ExperimentResult result;
    result.config = cfg;

    for (std::size_t level = 0; level < cfg.noiseLevels.size(); ++level) {
        const auto& noise = cfg.noiseLevels[level];
        const auto scenario = scenarioName(cfg, noise);
        const std::uint64_t base = deriveSeed(cfg.seed, level);

        auto fail = [&](const std::string& evaluator, const std::string& what) {
            ResultRow r;
            r.scenario = scenario;
            r.evaluator = evaluator;
            r.ok = false;
            r.error = what;
            const double nan = std::numeric_limits<double>::quiet_NaN();
            r.report = {nan, nan, nan, nan, {}};
            result.rows.push_back(std::move(r));
        };

        ScenarioData data;
        data.scenario = scenario;
        data.noise = noise;
        try {
            data.data = generate(cfg, noise, deriveSeed(base, kData));
            pipeline::DenoiseConfig dcfg;
            dcfg.qSize = cfg.qSize;
            dcfg.initSeed = deriveSeed(base, kInit);
            dcfg.mlop.eps = cfg.eps;
            dcfg.mlop.maxIters = cfg.maxIters;
            dcfg.mlop.seed = deriveSeed(base, kMlop);
            dcfg.mlop.useSketch = cfg.useSketch;
            dcfg.mlop.sketchDim = cfg.sketchDim;
            data.graph = pipeline::denoiseGraph(data.data.noisyPoints, data.data.noisyValues, dcfg);
            data.support = data.graph.support;
            data.nnStdInitial = nearestNeighborSpread(data.graph.q0);
            data.nnStdFinal = nearestNeighborSpread(data.graph.q);
        } catch (const std::exception& e) {
            fail(qRowLabel(0), e.what());
            continue;
        }

        const auto& ref = data.data.cleanPoints;
        const auto& refValues = data.data.cleanValues;
        const auto& graph = data.graph;

        auto addRow = [&](const std::string& evaluator, auto&& compute) {
            try {
                ResultRow r;
                r.scenario = scenario;
                r.evaluator = evaluator;
                r.report = compute();
                result.rows.push_back(std::move(r));
            } catch (const std::exception& e) {
                fail(evaluator, e.what());
            }
        };

        addRow(qRowLabel(0), [&] { return errorReport(graph.f0, graph.q0, ref, refValues); });
        addRow(qRowLabel(cfg.maxIters), [&] { return errorReport(graph.fTilde, graph.q, ref, refValues); });

        Rng pick(deriveSeed(base, kNewPoints));
        const auto newPoints = selectRows(ref, sampleWithoutReplacement(ref.size(), cfg.numNewPoints, pick));

        auto evaluate = [&](pipeline::Evaluator ev, bool clean) {
            const auto& centers = clean ? graph.q : graph.q0;
            const auto& values = clean ? graph.fTilde : graph.f0;
            return errorReport(pipeline::approximateAt(centers, values, newPoints, ev), newPoints, ref, refValues);
        };
        for (auto k : cfg.noisyKernels) {
            addRow(evaluatorLabel(rbf::toString(k), false), [&] { return evaluate(evaluatorFor(k), false); });
        }
        for (auto k : cfg.cleanKernels) {
            addRow(evaluatorLabel(rbf::toString(k), true), [&] { return evaluate(evaluatorFor(k), true); });
        }
        if (cfg.weightedAverage) {
            addRow(evaluatorLabel("wavg", false), [&] { return evaluate(pipeline::Evaluator::WeightedAverage, false); });
            addRow(evaluatorLabel("wavg", true), [&] { return evaluate(pipeline::Evaluator::WeightedAverage, true); });
        }
        result.scenarios.push_back(std::move(data));
    }
    return result;
}

void writeResultsCsv(const fs::path& path, const ExperimentResult& result) {
    if (path.has_parent_path()) {
        fs::create_directories(path.parent_path());
    }
    std::ofstream out(path);
    if (!out) {
        throw InvalidInput("cannot write " + path.string());
    }
    out << "scenario,evaluator,maxRelative,rmse,variance,denominator,seed\n";
    out << std::setprecision(17);
    for (const auto& r : result.rows) {
        out << r.scenario << ',' << r.evaluator << ',' << r.report.maxRelative << ',' << r.report.rmse << ','
            << r.report.variance << ',' << r.report.denominator << ',' << result.config.seed << '\n';
    }
}

nlohmann::json toJson(const ExperimentResult& result) {
    auto rows = nlohmann::json::array();
    for (const auto& r : result.rows) {
        nlohmann::json row = {{"scenario", r.scenario}, {"evaluator", r.evaluator}, {"ok", r.ok},
                              {"seed", result.config.seed}};
        if (r.ok) {
            row.update(reportJson(r.report));
        } else {
            row["error"] = r.error;
        }
        rows.push_back(std::move(row));
    }
    auto scenarios = nlohmann::json::array();
    for (const auto& s : result.scenarios) {
        scenarios.push_back({{"scenario", s.scenario},
                             {"noise", {{"domain", s.noise.domain}, {"codomain", s.noise.codomain}}},
                             {"h1", s.support.h1},
                             {"h2", s.support.h2},
                             {"normFactor", s.graph.normFactor},
                             {"nearestNeighborStd", {{"initial", s.nnStdInitial}, {"final", s.nnStdFinal}}},
                             {"iterations", s.graph.run.trace.size()}});
    }
    return {{"config", toJson(result.config)}, {"rows", rows}, {"scenarios", scenarios}};
}

void writePlotData(const fs::path& dir, const ExperimentResult& result, std::size_t k) {
    fs::create_directories(dir);
    for (const auto& s : result.scenarios) {
        auto frame = [&](const PointCloud& cloud) -> Matrix {
            Matrix m = cloud.matrix();
            if (s.data.embedding) {
                // Rows hold A p_hat, so rows * A recovers p_hat.
                m = m * *s.data.embedding;
            }
            return m.leftCols(static_cast<Eigen::Index>(std::min<std::size_t>(k, cloud.dim())));
        };
        auto emit = [&](const std::string& name, const PointCloud& cloud, const FunctionSamples& values) {
            Matrix coords = frame(cloud);
            Matrix joined(coords.rows(), coords.cols() + values.values.cols());
            joined << coords, values.values / values.normFactor;
            auto header = io::columnNames("x", static_cast<std::size_t>(coords.cols()));
            for (const auto& f : io::columnNames("f", values.codim())) header.push_back(f);
            io::writeCsv(dir / (s.scenario + "_" + name + ".csv"), header, joined);
        };
        emit("reference", s.data.cleanPoints, s.data.cleanValues);
        emit("noisy", s.data.noisyPoints, s.data.noisyValues);
        emit("q0", s.graph.q0, s.graph.f0);
        emit("qfinal", s.graph.q, s.graph.fTilde);
    }
}

void writeExperiment(const fs::path& dir, const ExperimentResult& result) {
    fs::create_directories(dir);
    writeResultsCsv(dir / "results.csv", result);
    io::writeJson(dir / "report.json", toJson(result));
    writePlotData(dir / "plotdata", result);
}

} // namespace mfa::harness
