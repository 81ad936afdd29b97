#pragma once

#include "mfa/types.hpp"

#include <cstdint>

namespace mfa {

/// Column-orthonormal n x m matrix adapted to a point cloud. Used only to
/// estimate norms: |S^t x| <= |x|, with equality on the span of S.
class SketchOperator {
public:
    SketchOperator(Eigen::MatrixXd basis, std::uint64_t seed);

    const Eigen::MatrixXd& basis() const { return basis_; }
    std::size_t ambientDim() const { return static_cast<std::size_t>(basis_.rows()); }
    std::size_t sketchDim() const { return static_cast<std::size_t>(basis_.cols()); }
    std::uint64_t seed() const { return seed_; }

    /// S^t x
    Eigen::RowVectorXd project(const RowRef& x) const;
    /// Every row of the cloud projected: (J x m).
    Matrix projectRows(const Matrix& rows) const;

private:
    Eigen::MatrixXd basis_;
    std::uint64_t seed_;
};

/// Gaussian J x m test matrix G, B = P^t G, S = first m columns of the
/// Householder QR factor of B. Throws DegenerateInput if B has rank < m.
SketchOperator buildSketch(const PointCloud& cloud, std::size_t m, std::uint64_t seed);

double sketchedNorm(const SketchOperator& op, const RowRef& x);

} // namespace mfa
