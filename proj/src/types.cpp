#include "mfa/types.hpp"

#include <cmath>

namespace mfa {

PointCloud::PointCloud(Matrix points) : points_(std::move(points)) {
    if (points_.rows() < 1 || points_.cols() < 1) {
        throw InvalidInput("point cloud needs at least one point of dimension >= 1");
    }
    requireFinite(points_, "point cloud");
}

PointCloud PointCloud::fromRows(std::span<const std::vector<double>> rows) {
    if (rows.empty()) {
        throw InvalidInput("point cloud needs at least one point");
    }
    const auto n = rows.front().size();
    Matrix m(static_cast<Eigen::Index>(rows.size()), static_cast<Eigen::Index>(n));
    for (std::size_t i = 0; i < rows.size(); ++i) {
        if (rows[i].size() != n) {
            throw InvalidInput("point " + std::to_string(i) + " has dimension " +
                               std::to_string(rows[i].size()) + ", expected " + std::to_string(n));
        }
        for (std::size_t c = 0; c < n; ++c) {
            m(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(c)) = rows[i][c];
        }
    }
    return PointCloud(std::move(m));
}

FunctionSamples::FunctionSamples(Matrix v, double factor) : values(std::move(v)), normFactor(factor) {
    if (!(normFactor > 0.0) || !std::isfinite(normFactor)) {
        throw InvalidInput("normalization factor must be positive and finite");
    }
    requireFinite(values, "function values");
}

void requireFinite(const Matrix& m, const std::string& what) {
    if (!m.allFinite()) {
        throw InvalidInput(what + " contains non-finite entries");
    }
}

} // namespace mfa
