#include "jsdf/optimize.hpp"

#include <chrono>
#include <cmath>
#include <stdexcept>

#include "jsdf/adam.hpp"
#include "jsdf/formats.hpp"
#include "jsdf/kinematics.hpp"
#include "jsdf/rng.hpp"

namespace jsdf {

namespace {

Pose clamp_pose(const Pose& pose, const Eigen::VectorXd& lo,
                const Eigen::VectorXd& hi) {
  return pose.cwiseMax(lo).cwiseMin(hi);
}

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0)
      .count();
}

// Field values and gradients for a stack of poses (rows).
using BatchField = std::function<void(const Eigen::MatrixXd&, Eigen::VectorXd&,
                                      Eigen::MatrixXd&)>;

BatchField batch_from_scalar(const ScalarField& field) {
  return [field](const Eigen::MatrixXd& thetas, Eigen::VectorXd& g,
                 Eigen::MatrixXd& grads) {
    g.resize(thetas.rows());
    grads.resize(thetas.rows(), thetas.cols());
    for (Eigen::Index i = 0; i < thetas.rows(); ++i) {
      const FieldSample s = field(thetas.row(i).transpose());
      g[i] = s.g;
      grads.row(i) = s.grad.transpose();
    }
  };
}

BatchField batch_from_params(const FieldParams& params) {
  return [params](const Eigen::MatrixXd& thetas, Eigen::VectorXd& g,
                  Eigen::MatrixXd& grads) {
    const FieldBatch fb = forward_field(params, thetas);
    g = fb.g;
    grads = input_gradients(params, fb);
  };
}

}  // namespace

ScalarField field_from_params(const FieldParams& params,
                              const RobotModel& model) {
  check_model_compatible(params, model);
  return [params](const Pose& pose) {
    const FieldBatch fb = forward_field(params, pose.transpose());
    FieldSample s;
    s.g = fb.g[0];
    s.grad = input_gradients(params, fb).row(0).transpose();
    return s;
  };
}

namespace {

// Shared Adam descent. `objective` maps the current sample to the descended
// value and its gradient; `stop` decides convergence from the sample.
OptimTrace descend(const ScalarField& field, const Eigen::VectorXd& lo,
                   const Eigen::VectorXd& hi, const Pose& pose0,
                   const ResolveConfig& cfg,
                   const std::function<std::pair<double, Eigen::VectorXd>(
                       const FieldSample&)>& objective,
                   const std::function<bool(const FieldSample&)>& stop) {
  if (cfg.l_thres > 0.0) {
    throw std::invalid_argument("l_thres must be <= 0");
  }
  if (cfg.max_iters < 1) {
    throw std::invalid_argument("max_iters must be >= 1");
  }
  const auto t0 = std::chrono::steady_clock::now();
  OptimTrace trace;
  Pose theta = pose0;
  Adam adam(theta.size(), cfg.learning_rate, cfg.beta1, cfg.beta2, cfg.eps);

  FieldSample s = field(theta);
  if (!std::isfinite(s.g) || !s.grad.allFinite()) {
    throw std::runtime_error("non-finite field value at the initial pose");
  }
  trace.rows.push_back({0, s.g, s.grad.norm(), theta});
  if (stop(s)) {
    trace.converged = true;
    trace.wall_time_s = seconds_since(t0);
    return trace;
  }
  for (int it = 1; it <= cfg.max_iters; ++it) {
    const Eigen::VectorXd grad = objective(s).second;
    adam.step(theta, grad);
    theta = clamp_pose(theta, lo, hi);
    s = field(theta);
    if (!std::isfinite(s.g) || !s.grad.allFinite()) {
      trace.aborted = true;
      trace.abort_reason = "non-finite field value at iteration " +
                           std::to_string(it);
      break;
    }
    trace.rows.push_back({it, s.g, s.grad.norm(), theta});
    trace.iterations = it;
    if (stop(s)) {
      trace.converged = true;
      break;
    }
  }
  trace.move_angle = (trace.rows.back().pose - pose0).norm();
  trace.wall_time_s = seconds_since(t0);
  return trace;
}

}  // namespace

OptimTrace resolve_pose_field(const ScalarField& field,
                              const Eigen::VectorXd& lo,
                              const Eigen::VectorXd& hi, const Pose& pose0,
                              const ResolveConfig& cfg) {
  return descend(
      field, lo, hi, pose0, cfg,
      [](const FieldSample& s) { return std::make_pair(s.g, s.grad); },
      [&cfg](const FieldSample& s) { return s.g <= cfg.l_thres; });
}

OptimTrace resolve_pose(const FieldParams& params, const RobotModel& model,
                        const Pose& pose0, const ResolveConfig& cfg) {
  const ScalarField field = field_from_params(params, model);
  const Eigen::VectorXd lo = model.limits_lo();
  const Eigen::VectorXd hi = model.limits_hi();
  if (cfg.objective == ResolveObjective::kSdf) {
    return resolve_pose_field(field, lo, hi, pose0, cfg);
  }
  // Probability mode: descend f = sigmoid(s g); stop when f < 0.5.
  const double s_scale = params.scale();
  return descend(
      field, lo, hi, pose0, cfg,
      [s_scale](const FieldSample& s) {
        const double f = sigmoid(s_scale * s.g);
        const Eigen::VectorXd grad = (f * (1.0 - f) * s_scale) * s.grad;
        return std::make_pair(f, grad);
      },
      [s_scale](const FieldSample& s) {
        return sigmoid(s_scale * s.g) < 0.5;
      });
}

namespace {

std::pair<std::vector<Pose>, OptimTrace> optimize_trajectory_impl(
    const BatchField& field, const Eigen::VectorXd& lo,
    const Eigen::VectorXd& hi, const std::vector<Pose>& waypoints,
    const TrajConfig& cfg) {
  const int n = static_cast<int>(waypoints.size());
  if (n < 2) {
    throw std::invalid_argument("trajectory needs at least 2 waypoints");
  }
  if (cfg.gamma1 < 0.0 || cfg.gamma2 < 0.0) {
    throw std::invalid_argument("trajectory weights must be >= 0");
  }
  if (cfg.max_iters < 0) {
    throw std::invalid_argument("max_iters must be >= 0");
  }
  const int K = static_cast<int>(waypoints.front().size());
  Eigen::MatrixXd path(n, K);
  for (int i = 0; i < n; ++i) path.row(i) = waypoints[i].transpose();

  Eigen::VectorXd g;
  Eigen::MatrixXd grads;
  field(path, g, grads);
  if (cfg.endpoints_frozen) {
    for (int idx : {0, n - 1}) {
      if (!(g[idx] <= cfg.l_thres)) {
        throw std::invalid_argument(
            "frozen endpoint " + std::to_string(idx) + " has g = " +
            fmt_double(g[idx]) + " > l_thres = " + fmt_double(cfg.l_thres));
      }
    }
  }

  const auto t0 = std::chrono::steady_clock::now();
  const int first_free = cfg.endpoints_frozen ? 1 : 0;
  const int last_free = cfg.endpoints_frozen ? n - 2 : n - 1;
  const int free_count = last_free - first_free + 1;
  OptimTrace trace;

  auto to_poses = [&]() {
    std::vector<Pose> out;
    out.reserve(n);
    for (int i = 0; i < n; ++i) {
      // Frozen endpoints are returned bit-identical to the inputs.
      if (cfg.endpoints_frozen && (i == 0 || i == n - 1)) {
        out.push_back(waypoints[i]);
      } else {
        out.push_back(path.row(i).transpose());
      }
    }
    return out;
  };

  if (free_count <= 0 || cfg.max_iters == 0) {
    trace.converged = (g.array() <= cfg.l_thres).all();
    return {to_poses(), trace};
  }

  Eigen::VectorXd state(free_count * K);
  for (int i = 0; i < free_count; ++i) {
    state.segment(i * K, K) = path.row(first_free + i).transpose();
  }
  Adam adam(state.size(), cfg.learning_rate, cfg.beta1, cfg.beta2, cfg.eps);

  auto tv_unit = [&](int a, int b) -> Eigen::RowVectorXd {
    const Eigen::RowVectorXd d = path.row(b) - path.row(a);
    const double nrm = d.norm();
    return nrm > 1e-12 ? Eigen::RowVectorXd(d / nrm)
                       : Eigen::RowVectorXd(Eigen::RowVectorXd::Zero(K));
  };

  for (int it = 1; it <= cfg.max_iters; ++it) {
    double loss = 0.0;
    for (int i = 0; i < n; ++i) {
      loss += cfg.gamma1 * std::max(g[i] - cfg.l_thres, 0.0) / n;
    }
    for (int i = 0; i + 1 < n; ++i) {
      loss += cfg.gamma2 * (path.row(i + 1) - path.row(i)).norm() / (n - 1);
    }
    if (!std::isfinite(loss)) {
      throw std::runtime_error("non-finite trajectory loss at iteration " +
                               std::to_string(it));
    }

    Eigen::VectorXd grad = Eigen::VectorXd::Zero(state.size());
    for (int i = 0; i < free_count; ++i) {
      const int w = first_free + i;
      Eigen::RowVectorXd gi = Eigen::RowVectorXd::Zero(K);
      if (g[w] > cfg.l_thres) {
        gi += (cfg.gamma1 / n) * grads.row(w);
      }
      if (w > 0) gi += (cfg.gamma2 / (n - 1)) * tv_unit(w - 1, w);
      if (w + 1 < n) gi -= (cfg.gamma2 / (n - 1)) * tv_unit(w, w + 1);
      grad.segment(i * K, K) = gi.transpose();
    }

    trace.rows.push_back({it - 1, loss, grad.norm(), Pose()});
    adam.step(state, grad);
    for (int i = 0; i < free_count; ++i) {
      const Pose clamped = clamp_pose(state.segment(i * K, K), lo, hi);
      state.segment(i * K, K) = clamped;
      path.row(first_free + i) = clamped.transpose();
    }
    field(path, g, grads);
    trace.iterations = it;
  }
  trace.converged = (g.array() <= cfg.l_thres).all();
  trace.wall_time_s = seconds_since(t0);
  return {to_poses(), trace};
}

}  // namespace

std::pair<std::vector<Pose>, OptimTrace> optimize_trajectory_field(
    const ScalarField& field, const Eigen::VectorXd& lo,
    const Eigen::VectorXd& hi, const std::vector<Pose>& waypoints,
    const TrajConfig& cfg) {
  return optimize_trajectory_impl(batch_from_scalar(field), lo, hi, waypoints,
                                  cfg);
}

std::pair<std::vector<Pose>, OptimTrace> optimize_trajectory(
    const FieldParams& params, const RobotModel& model,
    const std::vector<Pose>& waypoints, const TrajConfig& cfg) {
  check_model_compatible(params, model);
  return optimize_trajectory_impl(batch_from_params(params),
                                  model.limits_lo(), model.limits_hi(),
                                  waypoints, cfg);
}

std::pair<Pose, OptimTrace> tangent_descent_field(
    const ScalarField& field, const Eigen::VectorXd& lo,
    const Eigen::VectorXd& hi, const Pose& theta_start, const Pose& theta_end,
    double delta, int max_iters, double eps_tol) {
  if (theta_start.size() != theta_end.size()) {
    throw std::invalid_argument("start and end poses differ in size");
  }
  if (max_iters < 1 || delta <= 0.0 || eps_tol < 0.0) {
    throw std::invalid_argument("bad tangent-descent settings");
  }
  const auto t0 = std::chrono::steady_clock::now();
  OptimTrace trace;
  Pose theta = theta_start;
  for (int it = 0; it < max_iters; ++it) {
    const double l1 = (theta - theta_end).cwiseAbs().sum();
    if (l1 < eps_tol) {
      trace.converged = true;
      break;
    }
    const FieldSample s = field(theta);
    const double gn = s.grad.norm();
    trace.rows.push_back({it, s.g, gn, theta});
    const Eigen::VectorXd g_theta =
        (theta - theta_end).unaryExpr([](double v) {
          return v > 0.0 ? 1.0 : (v < 0.0 ? -1.0 : 0.0);
        });
    Eigen::VectorXd d;
    if (gn < 1e-8) {
      d = g_theta;
      ++trace.fallback_steps;
    } else {
      const Eigen::VectorXd ghat = s.grad / gn;
      d = g_theta - ghat.dot(g_theta) * ghat;
    }
    theta = clamp_pose(theta - delta * d, lo, hi);
    trace.iterations = it + 1;
  }
  if (!trace.converged) {
    trace.converged = (theta - theta_end).cwiseAbs().sum() < eps_tol;
  }
  trace.move_angle = (theta - theta_start).norm();
  trace.wall_time_s = seconds_since(t0);
  return {theta, trace};
}

std::pair<Pose, OptimTrace> tangent_descent(const FieldParams& params,
                                            const RobotModel& model,
                                            const Pose& theta_start,
                                            const Pose& theta_end, double delta,
                                            int max_iters, double eps_tol) {
  return tangent_descent_field(field_from_params(params, model),
                               model.limits_lo(), model.limits_hi(),
                               theta_start, theta_end, delta, max_iters,
                               eps_tol);
}

namespace {

SweepRow sweep_batch(const FieldParams& params, const Scene& scene,
                     const std::vector<Pose>& poses, double parameter,
                     const ResolveConfig& cfg) {
  SweepRow row;
  row.parameter = parameter;
  double pairs_before = 0.0, pairs_after = 0.0;
  for (const Pose& pose : poses) {
    pairs_before += detect_collisions(scene, pose).pair_count;
    const OptimTrace trace = resolve_pose(params, scene.robot, pose, cfg);
    row.mean_iters += trace.iterations;
    row.mean_time_s += trace.wall_time_s;
    row.mean_move_angle += trace.move_angle;
    pairs_after += detect_collisions(scene, trace.rows.back().pose).pair_count;
  }
  const double n = static_cast<double>(poses.size());
  row.mean_iters /= n;
  row.mean_time_s /= n;
  row.mean_move_angle /= n;
  row.pairs_before = pairs_before / n;
  row.pairs_after = pairs_after / n;
  return row;
}

}  // namespace

std::vector<SweepRow> threshold_sweep(const FieldParams& params,
                                      const Scene& scene,
                                      const std::vector<Pose>& poses,
                                      const std::vector<double>& thresholds,
                                      double learning_rate, int max_iters) {
  if (poses.empty()) {
    throw std::invalid_argument("sweep needs a nonempty pose batch");
  }
  std::vector<SweepRow> rows;
  for (double l : thresholds) {
    ResolveConfig cfg;
    cfg.l_thres = l;
    cfg.learning_rate = learning_rate;
    cfg.max_iters = max_iters;
    rows.push_back(sweep_batch(params, scene, poses, l, cfg));
  }
  return rows;
}

std::vector<SweepRow> lr_sweep(const FieldParams& params, const Scene& scene,
                               const std::vector<Pose>& poses,
                               const std::vector<double>& rates,
                               double l_thres, int max_iters) {
  if (poses.empty()) {
    throw std::invalid_argument("sweep needs a nonempty pose batch");
  }
  std::vector<SweepRow> rows;
  for (double lr : rates) {
    ResolveConfig cfg;
    cfg.l_thres = l_thres;
    cfg.learning_rate = lr;
    cfg.max_iters = max_iters;
    rows.push_back(sweep_batch(params, scene, poses, lr, cfg));
  }
  return rows;
}

std::vector<Pose> sample_collided_poses(const Scene& scene, int n,
                                        std::uint64_t seed, long max_draws) {
  Rng rng(seed);
  const Eigen::VectorXd lo = scene.robot.limits_lo();
  const Eigen::VectorXd hi = scene.robot.limits_hi();
  std::vector<Pose> out;
  long draws = 0;
  while (static_cast<int>(out.size()) < n) {
    if (draws++ >= max_draws) {
      throw std::runtime_error("could not sample enough collided poses");
    }
    const Pose theta = rng.uniform_vector(lo, hi);
    if (detect_collisions(scene, theta).collided) {
      out.push_back(theta);
    }
  }
  return out;
}

std::string trace_to_csv(const OptimTrace& trace) {
  const Eigen::Index k =
      trace.rows.empty() ? 0 : trace.rows.front().pose.size();
  std::string out = "iter,g,grad_norm";
  for (Eigen::Index i = 0; i < k; ++i) {
    out += ",theta" + std::to_string(i);
  }
  out += '\n';
  for (const TraceRow& r : trace.rows) {
    std::vector<std::string> cells = {std::to_string(r.iter), fmt_double(r.g),
                                      fmt_double(r.grad_norm)};
    for (Eigen::Index i = 0; i < r.pose.size(); ++i) {
      cells.push_back(fmt_double(r.pose[i]));
    }
    out += csv_row(cells);
  }
  return out;
}

std::string sweep_to_csv(const std::vector<SweepRow>& rows,
                         const std::string& parameter_name) {
  std::string out = parameter_name +
                    ",mean_iters,mean_time_s,mean_move_angle,pairs_before,"
                    "pairs_after\n";
  for (const SweepRow& r : rows) {
    out += csv_row({fmt_double(r.parameter), fmt_double(r.mean_iters),
                    fmt_double(r.mean_time_s), fmt_double(r.mean_move_angle),
                    fmt_double(r.pairs_before), fmt_double(r.pairs_after)});
  }
  return out;
}

std::string waypoints_to_csv(const std::vector<Pose>& waypoints) {
  const Eigen::Index k = waypoints.empty() ? 0 : waypoints.front().size();
  std::string out = "waypoint";
  for (Eigen::Index i = 0; i < k; ++i) out += ",theta" + std::to_string(i);
  out += '\n';
  for (std::size_t w = 0; w < waypoints.size(); ++w) {
    std::vector<std::string> cells = {std::to_string(w)};
    for (Eigen::Index i = 0; i < waypoints[w].size(); ++i) {
      cells.push_back(fmt_double(waypoints[w][i]));
    }
    out += csv_row(cells);
  }
  return out;
}

}  // namespace jsdf
