#include "mfa/sketch.hpp"

#include "mfa/rng.hpp"

#include <cmath>
#include <string>

namespace mfa {

SketchOperator::SketchOperator(Eigen::MatrixXd basis, std::uint64_t seed)
    : basis_(std::move(basis)), seed_(seed) {}

Eigen::RowVectorXd SketchOperator::project(const RowRef& x) const {
    if (static_cast<std::size_t>(x.size()) != ambientDim()) {
        throw InvalidInput("sketch: vector of length " + std::to_string(x.size()) +
                           " against ambient dimension " + std::to_string(ambientDim()));
    }
    return x * basis_;
}

Matrix SketchOperator::projectRows(const Matrix& rows) const {
    if (static_cast<std::size_t>(rows.cols()) != ambientDim()) {
        throw InvalidInput("sketch: rows have the wrong dimension");
    }
    return rows * basis_;
}

SketchOperator buildSketch(const PointCloud& cloud, std::size_t m, std::uint64_t seed) {
    const auto n = cloud.dim();
    const auto count = cloud.size();
    if (m < 1 || m > n || m > count) {
        throw InvalidInput("sketch dimension must satisfy 1 <= m <= min(n, J); got m = " +
                           std::to_string(m) + " with n = " + std::to_string(n) +
                           ", J = " + std::to_string(count));
    }
    const auto rows = static_cast<Eigen::Index>(count);
    const auto cols = static_cast<Eigen::Index>(m);

    Rng rng(seed);
    Eigen::MatrixXd gaussian(rows, cols);
    for (Eigen::Index j = 0; j < rows; ++j) {
        for (Eigen::Index c = 0; c < cols; ++c) {
            gaussian(j, c) = rng.normal();
        }
    }
    const Eigen::MatrixXd b = cloud.matrix().transpose() * gaussian;

    Eigen::HouseholderQR<Eigen::MatrixXd> qr(b);
    const auto& r = qr.matrixQR();
    const double scale = r.diagonal().cwiseAbs().maxCoeff();
    for (Eigen::Index k = 0; k < cols; ++k) {
        if (!(std::abs(r(k, k)) > 1e-12 * scale)) {
            throw DegenerateInput("sketch matrix has rank " + std::to_string(k) + " < m = " +
                                  std::to_string(m) + "; use a smaller sketch dimension");
        }
    }
    Eigen::MatrixXd basis = qr.householderQ() * Eigen::MatrixXd::Identity(static_cast<Eigen::Index>(n), cols);
    return SketchOperator(std::move(basis), seed);
}

double sketchedNorm(const SketchOperator& op, const RowRef& x) {
    return op.project(x).norm();
}

} // namespace mfa
