#pragma once

#include <Eigen/Dense>

#include <cstddef>
#include <vector>
#include <span>
#include <stdexcept>
#include <string>

namespace mfa {

/// Row-major so that each point is a contiguous row.
using Matrix = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
using Vector = Eigen::VectorXd;
using RowRef = Eigen::Ref<const Eigen::RowVectorXd>;

/// Malformed arguments: dimension mismatch, counts out of range, non-finite data.
class InvalidInput : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

/// Inputs that are well-formed but geometrically unusable (duplicate points,
/// rank-deficient clouds, unsatisfiable neighborhood counts).
class DegenerateInput : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Failures raised while iterating or solving (divergence, singular systems).
class NumericalError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// An ordered set of J points in R^n, stored one point per row.
class PointCloud {
public:
    PointCloud() = default;
    explicit PointCloud(Matrix points);

    static PointCloud fromRows(std::span<const std::vector<double>> rows);

    std::size_t size() const { return static_cast<std::size_t>(points_.rows()); }
    std::size_t dim() const { return static_cast<std::size_t>(points_.cols()); }
    bool empty() const { return points_.rows() == 0; }

    auto row(std::size_t i) const { return points_.row(static_cast<Eigen::Index>(i)); }
    auto row(std::size_t i) { return points_.row(static_cast<Eigen::Index>(i)); }

    const Matrix& matrix() const { return points_; }
    Matrix& matrix() { return points_; }

private:
    Matrix points_;
};

/// Values of f : R^n -> R^s aligned index-wise with a PointCloud.
///
/// normFactor records the scale applied when the values were embedded next to
/// their points; it is 1 for values in their natural units.
struct FunctionSamples {
    Matrix values;
    double normFactor = 1.0;

    FunctionSamples() = default;
    explicit FunctionSamples(Matrix v, double factor = 1.0);

    std::size_t size() const { return static_cast<std::size_t>(values.rows()); }
    std::size_t codim() const { return static_cast<std::size_t>(values.cols()); }
};

/// Throws InvalidInput unless every entry is finite.
void requireFinite(const Matrix& m, const std::string& what);

} // namespace mfa
