#include "mfa/io.hpp"

#include <charconv>
#include <iomanip>
#include <fstream>
#include <sstream>

namespace mfa::io {

namespace fs = std::filesystem;

namespace {

bool parseRow(const std::string& line, std::vector<double>& out) {
    out.clear();
    std::size_t start = 0;
    while (start <= line.size()) {
        auto end = line.find(',', start);
        if (end == std::string::npos) {
            end = line.size();
        }
        std::string field = line.substr(start, end - start);
        while (!field.empty() && (field.back() == '\r' || field.back() == ' ')) field.pop_back();
        while (!field.empty() && field.front() == ' ') field.erase(field.begin());
        double v = 0.0;
        const auto res = std::from_chars(field.data(), field.data() + field.size(), v);
        if (field.empty() || res.ec != std::errc() || res.ptr != field.data() + field.size()) {
            return false;
        }
        out.push_back(v);
        start = end + 1;
    }
    return true;
}

std::ofstream openOut(const fs::path& path) {
    if (path.has_parent_path()) {
        fs::create_directories(path.parent_path());
    }
    std::ofstream out(path);
    if (!out) {
        throw InvalidInput("cannot write " + path.string());
    }
    return out;
}

} // namespace

void writeCsv(const fs::path& path, const std::vector<std::string>& header, const Matrix& rows) {
    auto out = openOut(path);
    for (std::size_t c = 0; c < header.size(); ++c) {
        out << (c ? "," : "") << header[c];
    }
    out << '\n' << std::setprecision(17);
    for (Eigen::Index i = 0; i < rows.rows(); ++i) {
        for (Eigen::Index c = 0; c < rows.cols(); ++c) {
            out << (c ? "," : "") << rows(i, c);
        }
        out << '\n';
    }
}

Matrix readCsv(const fs::path& path) {
    std::ifstream in(path);
    if (!in) {
        throw InvalidInput("cannot read " + path.string());
    }
    std::vector<std::vector<double>> rows;
    std::vector<double> row;
    std::string line;
    bool first = true;
    std::size_t lineNo = 0;
    while (std::getline(in, line)) {
        ++lineNo;
        if (line.empty() || line == "\r") {
            continue;
        }
        if (!parseRow(line, row)) {
            if (first) {
                first = false;
                continue;
            }
            throw InvalidInput(path.string() + ":" + std::to_string(lineNo) + ": non-numeric field");
        }
        first = false;
        if (!rows.empty() && row.size() != rows.front().size()) {
            throw InvalidInput(path.string() + ":" + std::to_string(lineNo) + ": ragged row");
        }
        rows.push_back(row);
    }
    if (rows.empty()) {
        throw InvalidInput(path.string() + " has no data rows");
    }
    Matrix m(static_cast<Eigen::Index>(rows.size()), static_cast<Eigen::Index>(rows.front().size()));
    for (std::size_t i = 0; i < rows.size(); ++i) {
        for (std::size_t c = 0; c < rows[i].size(); ++c) {
            m(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(c)) = rows[i][c];
        }
    }
    return m;
}

std::vector<std::string> columnNames(const std::string& prefix, std::size_t count) {
    std::vector<std::string> names;
    for (std::size_t c = 0; c < count; ++c) {
        names.push_back(prefix + std::to_string(c + 1));
    }
    return names;
}

nlohmann::json readJson(const fs::path& path) {
    std::ifstream in(path);
    if (!in) {
        throw InvalidInput("cannot read " + path.string());
    }
    try {
        return nlohmann::json::parse(in);
    } catch (const nlohmann::json::parse_error& e) {
        throw InvalidInput(path.string() + ": " + e.what());
    }
}

void writeJson(const fs::path& path, const nlohmann::json& doc) {
    auto out = openOut(path);
    out << doc.dump(2) << '\n';
}

nlohmann::json toJson(const mlop::MlopConfig& cfg) {
    nlohmann::json doc = {{"eps", cfg.eps},
                          {"h1", cfg.h1},
                          {"h2", cfg.h2},
                          {"eta", "inverse-cube"},
                          {"maxIters", cfg.maxIters},
                          {"gradTol", cfg.gradTol},
                          {"seed", cfg.seed},
                          {"useSketch", cfg.useSketch},
                          {"sketchDim", cfg.sketchDim},
                          {"lambdaSchedule", mlop::toString(cfg.lambdaSchedule)}};
    if (cfg.gamma0) {
        doc["gamma0"] = *cfg.gamma0;
    }
    return doc;
}

mlop::MlopConfig mlopConfigFromJson(const nlohmann::json& doc) {
    if (!doc.is_object()) {
        throw InvalidInput("MLOP config must be a JSON object");
    }
    mlop::MlopConfig cfg;
    for (const auto& [key, value] : doc.items()) {
        if (key == "eps") cfg.eps = value.get<double>();
        else if (key == "h1") cfg.h1 = value.get<double>();
        else if (key == "h2") cfg.h2 = value.get<double>();
        else if (key == "eta") {
            if (value.get<std::string>() != "inverse-cube") {
                throw InvalidInput("MLOP config: only eta = inverse-cube is supported");
            }
        }
        else if (key == "maxIters") cfg.maxIters = value.get<int>();
        else if (key == "gradTol") cfg.gradTol = value.get<double>();
        else if (key == "gamma0") cfg.gamma0 = value.get<double>();
        else if (key == "seed") cfg.seed = value.get<std::uint64_t>();
        else if (key == "useSketch") cfg.useSketch = value.get<bool>();
        else if (key == "sketchDim") cfg.sketchDim = value.get<std::size_t>();
        else if (key == "lambdaSchedule") cfg.lambdaSchedule = mlop::lambdaScheduleFromString(value.get<std::string>());
        else throw InvalidInput("MLOP config: unknown key '" + key + "'");
    }
    return cfg;
}

void writeDenoisedGraph(const fs::path& dir, const pipeline::DenoisedGraph& graph) {
    fs::create_directories(dir);
    writeCsv(dir / "points.csv", columnNames("x", graph.q.dim()), graph.q.matrix());
    writeCsv(dir / "values.csv", columnNames("f", graph.fTilde.codim()), graph.fTilde.values);
    nlohmann::json manifest = {{"normFactor", graph.normFactor},
                               {"config", toJson(graph.effectiveConfig)},
                               {"seed", graph.effectiveConfig.seed},
                               {"h1", graph.support.h1},
                               {"h2", graph.support.h2},
                               {"iterations", graph.run.trace.size()},
                               {"points", graph.q.size()}};
    writeJson(dir / "manifest.json", manifest);
    std::ofstream trace(dir / "trace.csv");
    mlop::writeTraceCsv(trace, graph.run.trace);
}

std::pair<PointCloud, FunctionSamples> readPointsAndValues(const fs::path& dir) {
    PointCloud points(readCsv(dir / "points.csv"));
    FunctionSamples values(readCsv(dir / "values.csv"));
    if (points.size() != values.size()) {
        throw InvalidInput(dir.string() + ": points.csv and values.csv have different row counts");
    }
    return {std::move(points), std::move(values)};
}

} // namespace mfa::io
