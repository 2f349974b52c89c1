#pragma once

#include <functional>
#include <utility>
#include <vector>

#include "jsdf/collision.hpp"
#include "jsdf/field.hpp"

namespace jsdf {

/// Value and input gradient of a scalar field over joint space; the trained
/// network satisfies this, and tests substitute analytic fields.
struct FieldSample {
  double g = 0.0;
  Eigen::VectorXd grad;
};
using ScalarField = std::function<FieldSample(const Pose&)>;

ScalarField field_from_params(const FieldParams& params,
                              const RobotModel& model);

enum class ResolveObjective { kSdf, kProbability };

struct ResolveConfig {
  double l_thres = -0.1;  // <= 0
  double learning_rate = 0.01;
  int max_iters = 1000;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double eps = 1e-8;
  // kProbability descends f until f < 0.5 (the no-regularizer ablation rule).
  ResolveObjective objective = ResolveObjective::kSdf;
};

struct TraceRow {
  int iter = 0;
  double g = 0.0;
  double grad_norm = 0.0;
  Pose pose;
};

struct OptimTrace {
  std::vector<TraceRow> rows;
  int iterations = 0;
  bool converged = false;
  double move_angle = 0.0;  // |theta_final - theta_init|
  double wall_time_s = 0.0;
  int fallback_steps = 0;  // tangent descent: unprojected steps taken
  bool aborted = false;    // non-finite field value during descent
  std::string abort_reason;
};

/// Adam descent of the field value from pose0, clamped to joint limits each
/// step; stops when g <= l_thres (or f < 0.5 in probability mode).
OptimTrace resolve_pose(const FieldParams& params, const RobotModel& model,
                        const Pose& pose0, const ResolveConfig& cfg);

/// Analytic-field variant used by tests; objective is the field value.
OptimTrace resolve_pose_field(const ScalarField& field,
                              const Eigen::VectorXd& lo,
                              const Eigen::VectorXd& hi, const Pose& pose0,
                              const ResolveConfig& cfg);

struct TrajConfig {
  double gamma1 = 1.0;  // hinge weight on g - l_thres
  double gamma2 = 1.0;  // total-variation weight
  double l_thres = -0.1;
  double learning_rate = 0.01;
  int max_iters = 1000;
  bool endpoints_frozen = true;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double eps = 1e-8;
};

/// Minimizes gamma1 * mean ReLU(g - l_thres) + gamma2 * mean |dtheta| over
/// the interior waypoints by Adam (endpoints fixed when frozen). Frozen
/// endpoints must already satisfy g <= l_thres.
std::pair<std::vector<Pose>, OptimTrace> optimize_trajectory(
    const FieldParams& params, const RobotModel& model,
    const std::vector<Pose>& waypoints, const TrajConfig& cfg);

std::pair<std::vector<Pose>, OptimTrace> optimize_trajectory_field(
    const ScalarField& field, const Eigen::VectorXd& lo,
    const Eigen::VectorXd& hi, const std::vector<Pose>& waypoints,
    const TrajConfig& cfg);

/// Goal-seeking steps projected onto the tangent plane of the field
/// gradient: D = Gtheta - (Ghat . Gtheta) Ghat with Gtheta the sign vector
/// of the L1 distance to theta_end; falls back to the unprojected step when
/// |G_sdf| < 1e-8. Stops when the L1 distance drops below eps_tol.
std::pair<Pose, OptimTrace> tangent_descent(const FieldParams& params,
                                            const RobotModel& model,
                                            const Pose& theta_start,
                                            const Pose& theta_end, double delta,
                                            int max_iters, double eps_tol);

std::pair<Pose, OptimTrace> tangent_descent_field(
    const ScalarField& field, const Eigen::VectorXd& lo,
    const Eigen::VectorXd& hi, const Pose& theta_start, const Pose& theta_end,
    double delta, int max_iters, double eps_tol);

/// One threshold/learning-rate sweep row over a fixed batch of poses.
struct SweepRow {
  double parameter = 0.0;  // l_thres or learning rate
  double mean_iters = 0.0;
  double mean_time_s = 0.0;
  double mean_move_angle = 0.0;
  double pairs_before = 0.0;
  double pairs_after = 0.0;
};

std::vector<SweepRow> threshold_sweep(const FieldParams& params,
                                      const Scene& scene,
                                      const std::vector<Pose>& poses,
                                      const std::vector<double>& thresholds,
                                      double learning_rate, int max_iters);

std::vector<SweepRow> lr_sweep(const FieldParams& params, const Scene& scene,
                               const std::vector<Pose>& poses,
                               const std::vector<double>& rates,
                               double l_thres, int max_iters);

/// Uniform random poses that the oracle reports as collided.
std::vector<Pose> sample_collided_poses(const Scene& scene, int n,
                                        std::uint64_t seed,
                                        long max_draws = 1000000);

std::string trace_to_csv(const OptimTrace& trace);
std::string sweep_to_csv(const std::vector<SweepRow>& rows,
                         const std::string& parameter_name);
std::string waypoints_to_csv(const std::vector<Pose>& waypoints);

}  // namespace jsdf
