#pragma once

#include "mfa/types.hpp"

#include <json.hpp>

#include <string>
#include <vector>

namespace mfa::rbf {

/// Gaussian-type kernels with support width h, s = r/h:
///   Phi1 = e^{-s^2}
///   Phi2 = e^{-s^2} (1 + s)
///   Phi3 = e^{-s^2} (15 + 15 s + 6 s^2 + s^3)
enum class Kernel { Phi1, Phi2, Phi3 };

std::string toString(Kernel kernel);
Kernel kernelFromString(const std::string& name);

double phi(Kernel kernel, double r, double h);

/// Diagnostics of the interpolation solve.
struct SolveReport {
    double rcond = 0.0;
    bool regularized = false;
    double ridge = 0.0;
    /// max |Phi lambda - f| / max |f| at the centers.
    double relativeResidual = 0.0;
};

struct RbfModel {
    Kernel kernel = Kernel::Phi1;
    double h = 1.0;
    PointCloud centers;
    Matrix coeffs; // K x s
    SolveReport report;

    std::size_t codim() const { return static_cast<std::size_t>(coeffs.cols()); }
};

/// Solves Phi lambda = f for every codomain component with one factorization.
/// Falls back to a ridge of 1e-10 trace(Phi)/K when the reciprocal condition
/// estimate drops below 1e-12; throws NumericalError if that still fails.
RbfModel fitRbf(const PointCloud& centers, const FunctionSamples& values, Kernel kernel, double h);

Eigen::RowVectorXd evalRbf(const RbfModel& model, const RowRef& z);
Matrix evalRbf(const RbfModel& model, const PointCloud& points);

/// Exponent vectors of all monomials of total degree <= degree in `dim`
/// variables, graded-lex order.
std::vector<std::vector<int>> monomialExponents(std::size_t dim, int degree);
double evalMonomial(const std::vector<int>& exponents, const RowRef& x);

struct RbfPolyModel {
    RbfModel base;
    int polyDegree = 0;
    std::vector<std::vector<int>> monomials;
    Matrix polyCoeffs; // M x s
};

/// Polynomial-augmented interpolation with moment conditions
/// sum_j lambda_j p_i(x_j) = 0. Throws DegenerateInput when the centers are not
/// unisolvent for the requested degree.
RbfPolyModel fitRbfPoly(const PointCloud& centers, const FunctionSamples& values, Kernel kernel, double h,
                        int polyDegree);

Eigen::RowVectorXd evalRbfPoly(const RbfPolyModel& model, const RowRef& z);
Matrix evalRbfPoly(const RbfPolyModel& model, const PointCloud& points);

/// Gaussian-weighted mean of f with weights exp(-|x_i - z|^2 / h^2). If every
/// weight underflows, the nearest point's value is returned with a warning.
Eigen::RowVectorXd weightedAverage(const RowRef& z, const PointCloud& points, const FunctionSamples& values,
                                   double h);
Matrix weightedAverage(const PointCloud& queries, const PointCloud& points, const FunctionSamples& values,
                       double h);

nlohmann::json toJson(const RbfModel& model);
nlohmann::json toJson(const RbfPolyModel& model);
RbfModel rbfModelFromJson(const nlohmann::json& doc);
RbfPolyModel rbfPolyModelFromJson(const nlohmann::json& doc);

} // namespace mfa::rbf
