#pragma once

#include "mfa/sketch.hpp"
#include "mfa/types.hpp"

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

namespace mfa::mlop {

/// Repulsion profile eta(r). Only the inverse cube 1/(3 r^3) is provided.
enum class RepulsionProfile { InverseCube };

enum class LambdaSchedule { FirstIteration, EveryIteration };

std::string toString(LambdaSchedule schedule);
LambdaSchedule lambdaScheduleFromString(const std::string& name);

struct MlopConfig {
    double eps = 0.1;
    double h1 = 0.0;
    double h2 = 0.0;
    RepulsionProfile eta = RepulsionProfile::InverseCube;
    int maxIters = 100;
    double gradTol = 0.0;
    /// First-iteration step; derived from h1 and the initial gradient when unset.
    std::optional<double> gamma0;
    std::uint64_t seed = 0;
    bool useSketch = false;
    /// 0 selects min(ambient dimension, 20).
    std::size_t sketchDim = 0;
    LambdaSchedule lambdaSchedule = LambdaSchedule::FirstIteration;

    void validate() const;
};

double eta(double r);
/// |d eta / dr|
double etaSlope(double r);

/// Attraction coefficient from the squared (possibly sketched) distance |q - p|^2.
double attractionCoeffFromSquared(double squaredDistance, const MlopConfig& cfg);
/// Repulsion coefficient from the (possibly sketched) distance |q - q'|.
double repulsionCoeffFromDistance(double distance, const MlopConfig& cfg);

/// alpha such that (q - p) * alpha is the gradient of |q - p|_{H_eps} * exp(-|q-p|^2/h1^2).
double attractionCoeff(const RowRef& q, const RowRef& p, const MlopConfig& cfg);
/// beta such that (q - q') * beta is minus the gradient of eta(|q-q'|) * exp(-|q-q'|^2/h2^2).
/// Throws InvalidInput for coincident points.
double repulsionCoeff(const RowRef& q, const RowRef& qOther, const MlopConfig& cfg);

/// Barzilai-Borwein step <dq, dg> / <dg, dg>; `fallback` when dg vanishes.
double bbStep(const RowRef& dq, const RowRef& dg, double fallback);

/// Distances used inside weights and coefficients: exact, or through a sketch
/// built from the P cloud. Direction vectors are always full-dimensional.
class NormModel {
public:
    NormModel(const PointCloud& cloud, const MlopConfig& cfg);

    bool sketched() const { return sketch_.has_value(); }
    const std::optional<SketchOperator>& sketch() const { return sketch_; }
    /// Coordinates whose Euclidean distances stand in for the true ones.
    Matrix coordinates(const Matrix& rows) const;
    double norm(const RowRef& x) const;

private:
    std::optional<SketchOperator> sketch_;
};

/// Per-point attraction and repulsion sums of the gradient.
struct ForceTerms {
    Matrix attraction; // sum_j (q_i - p_j) alpha_ij
    Matrix repulsion;  // sum_{i' != i} (q_i - q_i') beta_ii'
    double attractionEnergy = 0.0;
    Eigen::VectorXd repulsionEnergy; // per point: sum_{i'} eta * w_hat
};

ForceTerms forceTerms(const Matrix& p, const Matrix& q, const MlopConfig& cfg, const NormModel& norms);

/// Cost G(Q) = sum_ij |q_i - p_j|_H w_ij + sum_i lambda_i sum_{i' != i} eta(|q_i - q_i'|) w_hat_ii'.
double cost(const PointCloud& p, const PointCloud& q, const Eigen::VectorXd& lambdas,
            const MlopConfig& cfg);
/// The summand of the cost that belongs to point i: its attraction terms plus
/// lambda_i times its own repulsion terms. The gradient below is exactly the
/// gradient of this summand with respect to q_i.
double pointCost(const PointCloud& p, const PointCloud& q, const Eigen::VectorXd& lambdas,
                 std::size_t i, const MlopConfig& cfg);

/// Balance factors -|sum_j (q_i - p_j) alpha| / |sum_i' (q_i - q_i') beta|, each <= 0.
/// A vanishing repulsion sum yields 0 (with a warning).
Eigen::VectorXd balanceLambda(const PointCloud& p, const PointCloud& q, const MlopConfig& cfg);
Eigen::VectorXd balanceLambda(const ForceTerms& terms, const NormModel& norms);

/// Per-point gradient sum_j (q - p_j) alpha - lambda * sum_i (q - q_i) beta.
Matrix gradient(const PointCloud& p, const PointCloud& q, const Eigen::VectorXd& lambdas,
                const MlopConfig& cfg);

/// I distinct points of P drawn uniformly without replacement.
PointCloud initQ(const PointCloud& p, std::size_t count, std::uint64_t seed);

struct TraceRow {
    int iter = 0;
    double maxGradNorm = 0.0;
    double meanDisplacement = 0.0;
    double costEstimate = 0.0;
};

struct MlopResult {
    PointCloud q;
    std::vector<TraceRow> trace;
    /// Repulsion weights used in the gradient (the magnitudes of the balance factors).
    Eigen::VectorXd repulsionWeights;
    bool converged = false;
};

/// Gradient descent with per-point Barzilai-Borwein steps.
MlopResult runMlop(const PointCloud& p, const PointCloud& q0, const MlopConfig& cfg);

void writeTraceCsv(std::ostream& out, const std::vector<TraceRow>& trace);

} // namespace mfa::mlop
