#include "mfa/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

namespace mfa::geometry {

double hEpsNormFromSquared(double squaredNorm, double eps) {
    return std::sqrt(squaredNorm + eps);
}

double hEpsNorm(const RowRef& x, double eps) {
    if (!(eps > 0.0)) {
        throw InvalidInput("H_eps norm needs eps > 0");
    }
    if (!x.allFinite()) {
        throw InvalidInput("H_eps norm of a non-finite vector");
    }
    return hEpsNormFromSquared(x.squaredNorm(), eps);
}

std::vector<double> nearestNeighborDistances(const PointCloud& cloud) {
    const auto count = cloud.size();
    if (count < 2) {
        throw InvalidInput("nearest-neighbor distances need at least two points");
    }
    const auto& m = cloud.matrix();
    std::vector<double> best(count, std::numeric_limits<double>::infinity());
    for (Eigen::Index i = 0; i < m.rows(); ++i) {
        for (Eigen::Index j = i + 1; j < m.rows(); ++j) {
            const double d2 = (m.row(i) - m.row(j)).squaredNorm();
            best[i] = std::min(best[i], d2);
            best[j] = std::min(best[j], d2);
        }
    }
    for (auto& d : best) {
        d = std::sqrt(d);
    }
    return best;
}

double median(std::vector<double> values) {
    if (values.empty()) {
        throw InvalidInput("median of an empty list");
    }
    const auto mid = values.size() / 2;
    std::nth_element(values.begin(), values.begin() + static_cast<std::ptrdiff_t>(mid), values.end());
    const double upper = values[mid];
    if (values.size() % 2 == 1) {
        return upper;
    }
    const double lower = *std::max_element(values.begin(), values.begin() + static_cast<std::ptrdiff_t>(mid));
    return 0.5 * (lower + upper);
}

double fillDistance(const PointCloud& cloud) {
    if (cloud.size() < 2) {
        throw InvalidInput("fill distance needs at least two points");
    }
    const double h0 = median(nearestNeighborDistances(cloud));
    if (!(h0 > 0.0)) {
        throw DegenerateInput("fill distance is zero: duplicate points dominate the cloud");
    }
    return h0;
}

double radiusGridValue(int step) {
    // Integer numerator keeps the grid free of accumulated rounding.
    return static_cast<double>(10 + step) / 10.0;
}

NeighborhoodRadius neighborhoodRadius(const PointCloud& cloud, const PointCloud& queries,
                                      std::size_t nu) {
    if (nu < 1) {
        throw InvalidInput("neighborhood count nu must be >= 1");
    }
    if (cloud.dim() != queries.dim()) {
        throw InvalidInput("neighborhoodRadius: dimension mismatch");
    }
    const double h0 = fillDistance(cloud);

    // Squared distance to the nu-th closest cloud point, per query.
    const auto& p = cloud.matrix();
    const auto& q = queries.matrix();
    double worst = -1.0;
    std::size_t worstIndex = 0;
    std::vector<double> d2(cloud.size());
    for (Eigen::Index i = 0; i < q.rows(); ++i) {
        double needed = std::numeric_limits<double>::infinity();
        if (nu <= cloud.size()) {
            for (Eigen::Index j = 0; j < p.rows(); ++j) {
                d2[j] = (q.row(i) - p.row(j)).squaredNorm();
            }
            std::nth_element(d2.begin(), d2.begin() + static_cast<std::ptrdiff_t>(nu - 1), d2.end());
            needed = d2[nu - 1];
        }
        if (needed > worst) {
            worst = needed;
            worstIndex = static_cast<std::size_t>(i);
        }
    }

    for (int step = 0; step < kRadiusGridSteps; ++step) {
        const double c = radiusGridValue(step);
        const double radius = c * h0;
        if (radius * radius >= worst) {
            return {c, radius};
        }
    }
    std::ostringstream msg;
    msg << "no radius multiplier up to " << radiusGridValue(kRadiusGridSteps - 1)
        << " puts " << nu << " points around query " << worstIndex;
    if (std::isfinite(worst)) {
        msg << " (needs radius " << std::sqrt(worst) << ", fill distance " << h0 << ")";
    } else {
        msg << " (cloud has only " << cloud.size() << " points)";
    }
    throw DegenerateInput(msg.str());
}

SupportSizes supportSizes(const PointCloud& cloud, const PointCloud& queries,
                          std::optional<double> h2Override) {
    if (queries.size() < 2 || cloud.size() < queries.size()) {
        throw InvalidInput("supportSizes needs J >= I >= 2");
    }
    SupportSizes out;
    out.nu = cloud.size() / queries.size();
    out.h0 = fillDistance(cloud);
    const auto attraction = neighborhoodRadius(cloud, queries, out.nu);
    out.c1 = attraction.c1;
    out.h0Hat = attraction.h0Hat;
    out.h1 = kSupportFactor * out.h0Hat;
    if (h2Override) {
        if (!(*h2Override > 0.0)) {
            throw InvalidInput("h2 override must be positive");
        }
        out.h2 = *h2Override;
    } else {
        const auto repulsion = neighborhoodRadius(queries, queries, 1);
        out.h2 = kSupportFactor * repulsion.h0Hat;
    }
    return out;
}

std::size_t countInBall(const PointCloud& cloud, const RowRef& center, double radius) {
    const double r2 = radius * radius;
    std::size_t count = 0;
    const auto& m = cloud.matrix();
    for (Eigen::Index j = 0; j < m.rows(); ++j) {
        if ((m.row(j) - center).squaredNorm() <= r2) {
            ++count;
        }
    }
    return count;
}

HRhoReport checkHRho(const PointCloud& cloud, const HRhoParams& params, const PointCloud& probes) {
    if (!(params.h > 0.0) || !(params.rho > 0.0) || params.kMax < 1) {
        throw InvalidInput("h-rho parameters need h > 0, rho > 0, kMax >= 1");
    }
    if (probes.dim() != cloud.dim()) {
        throw InvalidInput("checkHRho: probe dimension mismatch");
    }
    const auto n = static_cast<double>(cloud.dim());
    for (std::size_t y = 0; y < probes.size(); ++y) {
        for (int k = 1; k <= params.kMax; ++k) {
            const auto count = countInBall(cloud, probes.row(y), k * params.h);
            const double bound = params.rho * std::pow(static_cast<double>(k), n);
            if (static_cast<double>(count) > bound) {
                return {false, y, k, count, bound};
            }
        }
    }
    return {};
}

std::size_t nearestReference(const RowRef& z, const PointCloud& reference) {
    if (reference.empty()) {
        throw InvalidInput("nearestReference: empty reference set");
    }
    if (static_cast<std::size_t>(z.size()) != reference.dim()) {
        throw InvalidInput("nearestReference: dimension mismatch");
    }
    const auto& m = reference.matrix();
    std::size_t best = 0;
    double bestD2 = std::numeric_limits<double>::infinity();
    for (Eigen::Index j = 0; j < m.rows(); ++j) {
        const double d2 = (m.row(j) - z).squaredNorm();
        if (d2 < bestD2) {
            bestD2 = d2;
            best = static_cast<std::size_t>(j);
        }
    }
    return best;
}

} // namespace mfa::geometry
