#pragma once

#include "mfa/pipeline.hpp"
#include "mfa/types.hpp"

#include <json.hpp>

#include <filesystem>
#include <string>
#include <vector>

namespace mfa::io {

/// Writes a header line then one row per matrix row, 17 significant digits.
void writeCsv(const std::filesystem::path& path, const std::vector<std::string>& header, const Matrix& rows);
/// Reads a numeric CSV; a first line that does not parse as numbers is taken as a header.
Matrix readCsv(const std::filesystem::path& path);

std::vector<std::string> columnNames(const std::string& prefix, std::size_t count);

nlohmann::json readJson(const std::filesystem::path& path);
void writeJson(const std::filesystem::path& path, const nlohmann::json& doc);

nlohmann::json toJson(const mlop::MlopConfig& cfg);
/// Rejects unknown keys.
mlop::MlopConfig mlopConfigFromJson(const nlohmann::json& doc);

/// Directory layout: points.csv, values.csv, manifest.json (normFactor, config, seed).
void writeDenoisedGraph(const std::filesystem::path& dir, const pipeline::DenoisedGraph& graph);
/// Reads back points.csv and values.csv (values in natural units).
std::pair<PointCloud, FunctionSamples> readPointsAndValues(const std::filesystem::path& dir);

} // namespace mfa::io
