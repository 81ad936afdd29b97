#pragma once

#include "mfa/rng.hpp"
#include "mfa/types.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>

namespace testing {

inline mfa::Matrix randomMatrix(std::size_t rows, std::size_t cols, std::uint64_t seed, double scale = 1.0) {
    mfa::Rng rng(seed);
    mfa::Matrix m(static_cast<Eigen::Index>(rows), static_cast<Eigen::Index>(cols));
    for (Eigen::Index i = 0; i < m.rows(); ++i) {
        for (Eigen::Index c = 0; c < m.cols(); ++c) {
            m(i, c) = scale * rng.uniform(-1.0, 1.0);
        }
    }
    return m;
}

inline mfa::PointCloud randomCloud(std::size_t count, std::size_t dim, std::uint64_t seed, double scale = 1.0) {
    return mfa::PointCloud(randomMatrix(count, dim, seed, scale));
}

/// Uniform draws in [-1, 1]^dim, rejecting any point closer than `minSep`
/// times the mean grid spacing (2^dim / count)^(1/dim) to one already kept.
inline mfa::PointCloud separatedCloud(std::size_t count, std::size_t dim, std::uint64_t seed, double minSep = 0.5) {
    mfa::Rng rng(seed);
    const double spacing = std::pow(std::pow(2.0, static_cast<double>(dim)) / static_cast<double>(count),
                                    1.0 / static_cast<double>(dim));
    const double gap = minSep * spacing;
    mfa::Matrix m(static_cast<Eigen::Index>(count), static_cast<Eigen::Index>(dim));
    Eigen::Index kept = 0;
    while (kept < m.rows()) {
        Eigen::RowVectorXd x(m.cols());
        for (Eigen::Index c = 0; c < x.size(); ++c) x(c) = rng.uniform(-1.0, 1.0);
        bool ok = true;
        for (Eigen::Index i = 0; i < kept && ok; ++i) ok = (m.row(i) - x).norm() >= gap;
        if (ok) m.row(kept++) = x;
    }
    return mfa::PointCloud(m);
}

inline mfa::PointCloud line(std::initializer_list<double> xs) {
    mfa::Matrix m(static_cast<Eigen::Index>(xs.size()), 1);
    Eigen::Index i = 0;
    for (double x : xs) m(i++, 0) = x;
    return mfa::PointCloud(m);
}

inline double relErr(double a, double b) {
    return std::abs(a - b) / std::max({std::abs(a), std::abs(b), 1e-300});
}

/// Silences expected warnings for the lifetime of the guard.
struct QuietWarnings {
    QuietWarnings();
    ~QuietWarnings();
    bool previous;
};

} // namespace testing
