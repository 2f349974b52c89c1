#include "jsdf/trainer.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

#include "jsdf/adam.hpp"
#include "jsdf/formats.hpp"
#include "jsdf/kinematics.hpp"
#include "jsdf/rng.hpp"

namespace jsdf {

namespace {

double stable_bce(double z, double c) {
  return std::max(z, 0.0) - z * c + std::log1p(std::exp(-std::abs(z)));
}

void check_dataset(const Dataset& dataset, const RobotModel& model) {
  if (dataset.samples.empty()) {
    throw std::invalid_argument("dataset is empty");
  }
  if (dataset.joint_count != model.joint_count()) {
    throw std::invalid_argument("dataset joint count does not match robot");
  }
  for (const LabeledPose& s : dataset.samples) {
    validate_pose(model, s.theta, LimitPolicy::kReject);
  }
}

struct Split {
  std::vector<int> train;
  std::vector<int> holdout;
};

Split split_dataset(std::size_t n, double holdout_fraction, Rng& rng) {
  std::vector<int> perm(n);
  std::iota(perm.begin(), perm.end(), 0);
  rng.shuffle(perm);
  Split split;
  const std::size_t holdout_count =
      static_cast<std::size_t>(holdout_fraction * static_cast<double>(n));
  split.holdout.assign(perm.begin(), perm.begin() + holdout_count);
  split.train.assign(perm.begin() + holdout_count, perm.end());
  if (split.train.empty()) {
    throw std::invalid_argument("holdout fraction leaves no training data");
  }
  return split;
}

std::vector<LabeledPose> gather(const Dataset& ds, const std::vector<int>& idx) {
  std::vector<LabeledPose> out;
  out.reserve(idx.size());
  for (int i : idx) out.push_back(ds.samples[i]);
  return out;
}

TrainResult train_impl(const Dataset& dataset, const RobotModel& model,
                       const TrainConfig& config,
                       const TrainCallback& on_eval) {
  check_dataset(dataset, model);
  if (config.iterations < 0 || config.batch_size < 1) {
    throw std::invalid_argument("iterations must be >= 0, batch size >= 1");
  }
  if (config.head == HeadMode::kNdfRegression) {
    for (const LabeledPose& s : dataset.samples) {
      if (!s.ndf) {
        throw std::invalid_argument(
            "ndf regression head needs ndf labels on every sample");
      }
    }
  }

  Rng rng(config.seed);
  const Split split =
      split_dataset(dataset.samples.size(), config.holdout_fraction, rng);
  // Metrics fall back to the full dataset when nothing is held out.
  const std::vector<LabeledPose> holdout_slice =
      split.holdout.empty() ? dataset.samples : gather(dataset, split.holdout);

  TrainResult result;
  result.params = init_field(model, config.field, config.seed,
                             dataset.scene_id.empty() ? std::string("scene")
                                                      : dataset.scene_id);
  if (config.scale == ScaleMode::kFixedOne) {
    result.params.rho = 0.0;
  }
  result.holdout = split.holdout;

  const double alpha =
      config.regularizer == Regularizer::kEikonal ? config.alpha : 0.0;
  const Eigen::VectorXd lo = model.limits_lo();
  const Eigen::VectorXd hi = model.limits_hi();
  const int K = model.joint_count();

  Eigen::VectorXd theta_vec = pack(result.params);
  Adam adam(theta_vec.size(), config.learning_rate, config.beta1, config.beta2,
            config.eps);
  const Eigen::Index rho_index = theta_vec.size() - 1;

  std::vector<int> order = split.train;
  rng.shuffle(order);
  std::size_t cursor = 0;
  const int batch =
      std::min<int>(config.batch_size, static_cast<int>(order.size()));

  auto emit_metrics = [&](int step) {
    MetricsReport report =
        evaluate_metrics(result.params, model, holdout_slice);
    report.step = step;
    result.metrics.push_back(report);
    if (on_eval) on_eval(report, result.params);
  };

  if (config.iterations == 0) {
    emit_metrics(0);
    return result;
  }

  Eigen::MatrixXd thetas(batch, K);
  Eigen::VectorXd labels(batch), targets(batch);
  for (int step = 1; step <= config.iterations; ++step) {
    if (cursor + batch > order.size()) {
      rng.shuffle(order);
      cursor = 0;
    }
    for (int i = 0; i < batch; ++i) {
      const LabeledPose& s = dataset.samples[order[cursor + i]];
      thetas.row(i) = s.theta.transpose();
      labels[i] = s.label;
      if (config.head == HeadMode::kNdfRegression) targets[i] = *s.ndf;
    }
    cursor += batch;

    double loss_value = 0.0;
    Eigen::VectorXd grad;
    if (config.head == HeadMode::kNdfRegression) {
      loss_value = l1_loss_gradients(result.params, thetas, targets, &grad);
    } else {
      Eigen::MatrixXd eik(0, K);
      if (alpha > 0.0) {
        const int extra =
            config.eik_points == EikonalPoints::kBatchPlusUniform ? batch : 0;
        eik.resize(batch + extra, K);
        eik.topRows(batch) = thetas;
        for (int i = 0; i < extra; ++i) {
          eik.row(batch + i) = rng.uniform_vector(lo, hi).transpose();
        }
      }
      const FieldLoss loss = loss_param_gradients(result.params, thetas,
                                                  labels, eik, alpha, &grad);
      loss_value = loss.total;
    }
    if (!std::isfinite(loss_value)) {
      throw std::runtime_error("non-finite loss at step " +
                               std::to_string(step));
    }
    if (config.scale == ScaleMode::kFixedOne) {
      grad[rho_index] = 0.0;
    }
    adam.step(theta_vec, grad);
    unpack(result.params, theta_vec);

    if ((config.eval_every > 0 && step % config.eval_every == 0) ||
        step == config.iterations) {
      emit_metrics(step);
    }
  }
  return result;
}

}  // namespace

MetricsReport evaluate_metrics(const FieldParams& params,
                               const RobotModel& model,
                               const std::vector<LabeledPose>& slice) {
  check_model_compatible(params, model);
  if (slice.empty()) {
    throw std::invalid_argument("metrics need a nonempty slice");
  }
  const int K = params.joint_count;
  const double s = params.scale();
  MetricsReport report;
  const std::size_t n = slice.size();
  const std::size_t block = 8192;
  for (std::size_t at = 0; at < n; at += block) {
    const std::size_t m = std::min(block, n - at);
    Eigen::MatrixXd thetas(m, K);
    for (std::size_t i = 0; i < m; ++i) {
      thetas.row(i) = slice[at + i].theta.transpose();
    }
    const FieldBatch fb = forward_field(params, thetas);
    const Eigen::MatrixXd g_theta = input_gradients(params, fb);
    for (std::size_t i = 0; i < m; ++i) {
      const int label = slice[at + i].label;
      const double g = fb.g[static_cast<Eigen::Index>(i)];
      report.accuracy += ((g > 0.0) == (label == 1)) ? 1.0 : 0.0;
      report.bce += stable_bce(s * g, label);
      const double nrm = g_theta.row(static_cast<Eigen::Index>(i)).norm();
      report.mean_grad_norm += nrm;
      report.mean_eikonal += (nrm - 1.0) * (nrm - 1.0);
    }
  }
  report.accuracy /= static_cast<double>(n);
  report.bce /= static_cast<double>(n);
  report.mean_grad_norm /= static_cast<double>(n);
  report.mean_eikonal /= static_cast<double>(n);
  return report;
}

TrainResult train(const Dataset& dataset, const RobotModel& model,
                  const TrainConfig& config, const TrainCallback& on_eval) {
  return train_impl(dataset, model, config, on_eval);
}

TrainResult train_ndf_baseline(const Dataset& dataset, const RobotModel& model,
                               TrainConfig config,
                               const TrainCallback& on_eval) {
  config.head = HeadMode::kNdfRegression;
  config.regularizer = Regularizer::kNone;
  return train_impl(dataset, model, config, on_eval);
}

std::string metrics_to_csv(const std::vector<MetricsReport>& reports) {
  std::string out = "step,bce,eikonal,accuracy,grad_norm\n";
  for (const MetricsReport& r : reports) {
    out += csv_row({std::to_string(r.step), fmt_double(r.bce),
                    fmt_double(r.mean_eikonal), fmt_double(r.accuracy),
                    fmt_double(r.mean_grad_norm)});
  }
  return out;
}

}  // namespace jsdf
