#pragma once

#include "mfa/types.hpp"

#include <cstddef>
#include <optional>
#include <string>
#include <vector>

namespace mfa::geometry {

/// Smoothed norm sqrt(|x|^2 + eps). Strictly positive and smooth in x.
double hEpsNorm(const RowRef& x, double eps);
/// Same, from an already computed squared norm.
double hEpsNormFromSquared(double squaredNorm, double eps);

/// Distance from each point to its nearest other point.
std::vector<double> nearestNeighborDistances(const PointCloud& cloud);

/// Median (mean of the two middle order statistics for an even count).
double median(std::vector<double> values);

/// Median over the cloud of nearest-neighbor distances.
/// Throws InvalidInput for fewer than two points and DegenerateInput when the
/// result is zero (duplicates dominate).
double fillDistance(const PointCloud& cloud);

struct NeighborhoodRadius {
    double c1 = 0.0;
    double h0Hat = 0.0;
};

/// Candidate multipliers scanned by neighborhoodRadius: 1.0, 1.1, ..., 50.0.
inline constexpr int kRadiusGridSteps = 491;
double radiusGridValue(int step);

/// Smallest grid multiplier c such that every closed ball of radius c*h0
/// around a point of `queries` holds at least nu points of `cloud`, where h0
/// is the fill distance of `cloud`.
NeighborhoodRadius neighborhoodRadius(const PointCloud& cloud, const PointCloud& queries,
                                      std::size_t nu);

struct SupportSizes {
    double h0 = 0.0;
    double h0Hat = 0.0;
    double c1 = 0.0;
    double h1 = 0.0;
    double h2 = 0.0;
    std::size_t nu = 0;
};

/// 2*sqrt(2), the factor that turns a neighborhood radius into a Gaussian support.
inline constexpr double kSupportFactor = 2.8284271247461903;

/// Attraction support h1 from (cloud, queries) with nu = floor(J/I); repulsion
/// support h2 from the queries against themselves with nu = 1, unless
/// `h2Override` is given.
SupportSizes supportSizes(const PointCloud& cloud, const PointCloud& queries,
                          std::optional<double> h2Override = std::nullopt);

struct HRhoParams {
    double h = 0.0;
    double rho = 0.0;
    int kMax = 1;
};

struct HRhoReport {
    bool satisfied = true;
    // First violation, when !satisfied.
    std::size_t probe = 0;
    int k = 0;
    std::size_t count = 0;
    double bound = 0.0;
};

/// Density check: for each probe y and k in [1, kMax], #(cloud within k*h of y) <= rho*k^n
/// with n the ambient dimension.
HRhoReport checkHRho(const PointCloud& cloud, const HRhoParams& params, const PointCloud& probes);

/// Index of the closest reference point; ties resolve to the lowest index.
std::size_t nearestReference(const RowRef& z, const PointCloud& reference);

/// Number of points of `cloud` in the closed ball of the given radius.
std::size_t countInBall(const PointCloud& cloud, const RowRef& center, double radius);

} // namespace mfa::geometry
