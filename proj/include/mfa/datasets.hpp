#pragma once

#include "mfa/types.hpp"

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace mfa::datasets {

enum class TestFunction {
    O2Smooth,    // (1 + sin 10 theta) / 4
    O2NonSmooth, // (1 + arccos(cos 10 theta)) / 6
    Cylinder2D,  // 1.3 (1 + sin(0.5 u + 1.5 t))
    AngleSum,    // sum of the sphere angles
    SwissT,      // t
};

std::string toString(TestFunction fn);

/// Value of the test function at one row of intrinsic parameters, laid out as
/// the generator's `paramNames`.
double evaluateTestFunction(TestFunction fn, const RowRef& params);

struct Noise {
    double domain = 0.0;
    double codomain = 0.0;
};

struct GeneratedSet {
    std::string generator;
    TestFunction function = TestFunction::O2Smooth;
    PointCloud cleanPoints;
    PointCloud noisyPoints;
    Matrix params;
    std::vector<std::string> paramNames;
    FunctionSamples cleanValues;
    FunctionSamples noisyValues;
    std::uint64_t seed = 0;
    Noise noise;
    /// Orthogonal embedding applied to the points (O(2) only).
    std::optional<Matrix> embedding;
    std::optional<std::uint64_t> embeddingSeed;
};

/// Haar-distributed orthogonal matrix: QR of a seeded Gaussian matrix with the
/// signs of R's diagonal folded into Q.
Matrix randomOrthogonal(std::size_t n, std::uint64_t seed);

/// Adds an independent U(-a, a) draw to every coordinate.
Matrix addUniformNoise(const Matrix& data, double amplitude, std::uint64_t seed);
PointCloud addUniformNoise(const PointCloud& cloud, double amplitude, std::uint64_t seed);

struct O2Options {
    std::size_t count = 500;
    std::size_t dim = 60;
    TestFunction function = TestFunction::O2Smooth;
};

/// theta equally spaced on [-pi, pi) (the endpoint would duplicate theta = -pi);
/// p_hat = [cos, -sin, sin, cos, 0, ...]; points = A p_hat. Noise is added to
/// the embedded points.
GeneratedSet genO2(const O2Options& opts, const Noise& noise, std::uint64_t seed);

struct Cylinder2DOptions {
    std::size_t count = 800;
    std::size_t dim = 60;
    double radius = 1.5;
    double tMin = 0.0, tMax = 2.0;
    double uMin = 0.1 * 3.14159265358979323846, uMax = 1.5 * 3.14159265358979323846;
};

/// p = t v1 + R/sqrt(2) (cos u v2 + sin u v3) on an equally spaced (t, u) grid.
GeneratedSet genCylinder2D(const Cylinder2DOptions& opts, const Noise& noise, std::uint64_t seed);

/// Grid shape (nt, nu) with nt * nu == count whose aspect best matches the
/// parameter ranges.
std::pair<std::size_t, std::size_t> gridShape(std::size_t count, double tSpan, double uSpan);

struct CylinderDOptions {
    std::size_t count = 1200;
    std::size_t dim = 60;
    /// Number of sphere coordinates; the sphere has d - 1 angles.
    std::size_t sphereDim = 6;
    double radius = 1.5;
    double tMin = 0.0, tMax = 2.0;
    double uMin = 0.1 * 3.14159265358979323846, uMax = 0.6 * 3.14159265358979323846;
};

/// Hyperspherical x in R^d with radius R from d - 1 uniformly drawn angles;
/// p = t v0 + R^2 [x, 0, ...] with v0 = ones in the first d + 1 slots.
/// f = sum of the angles.
GeneratedSet genCylinderD(const CylinderDOptions& opts, const Noise& noise, std::uint64_t seed);

/// Hyperspherical coordinates: x_k = R sin u_1 ... sin u_{k-1} cos u_k, last one all sines.
Eigen::RowVectorXd sphereCoordinates(const RowRef& angles, double radius);

struct SwissRollOptions {
    std::size_t count = 800;
    std::size_t dim = 60;
};

/// t_j = 8 j / J + 2, y ~ U[-6, 6], p = [t sin t, y, t cos t, 0, ...] / 10, f = t.
GeneratedSet genSwissRoll(const SwissRollOptions& opts, const Noise& noise, std::uint64_t seed);

} // namespace mfa::datasets
