#pragma once

#include <functional>
#include <vector>

#include "jsdf/dataset.hpp"
#include "jsdf/field.hpp"

namespace jsdf {

enum class Regularizer { kEikonal, kNone };
enum class ScaleMode { kLearned, kFixedOne };
enum class HeadMode { kSdfClassifier, kNdfRegression };
enum class EikonalPoints { kBatchPlusUniform, kBatchOnly };

struct TrainConfig {
  int iterations = 10000;
  int batch_size = 512;
  double learning_rate = 1e-3;
  double alpha = 0.1;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double eps = 1e-8;
  int eval_every = 500;
  std::uint64_t seed = 0;
  double holdout_fraction = 0.1;
  Regularizer regularizer = Regularizer::kEikonal;
  ScaleMode scale = ScaleMode::kLearned;
  HeadMode head = HeadMode::kSdfClassifier;
  EikonalPoints eik_points = EikonalPoints::kBatchPlusUniform;
  FieldConfig field;
};

struct MetricsReport {
  int step = 0;
  double accuracy = 0.0;       // (f > 0.5) == (c == 1)
  double bce = 0.0;
  double mean_eikonal = 0.0;   // mean (|grad g| - 1)^2
  double mean_grad_norm = 0.0; // mean |grad g|
};

/// Per-eval callback; also invoked once at the final step. Used by the CLI
/// for CSV logging and periodic checkpoints.
using TrainCallback =
    std::function<void(const MetricsReport&, const FieldParams&)>;

struct TrainResult {
  FieldParams params;
  std::vector<MetricsReport> metrics;
  std::vector<int> holdout;  // dataset indices held out of training
};

/// Adam over shuffled mini-batches of the classification loss (or the NDF
/// L1 regression when head = kNdfRegression). The held-out split is fixed
/// by the seed before training. Aborts on a non-finite loss naming the step.
TrainResult train(const Dataset& dataset, const RobotModel& model,
                  const TrainConfig& config, const TrainCallback& on_eval = {});

/// Threshold-0.5 accuracy plus Eikonal statistics over a dataset slice.
MetricsReport evaluate_metrics(const FieldParams& params,
                               const RobotModel& model,
                               const std::vector<LabeledPose>& slice);

/// NDF baseline: same architecture, mean |g - ndf| replaces BCE, Eikonal off.
/// Requires ndf labels on every sample.
TrainResult train_ndf_baseline(const Dataset& dataset, const RobotModel& model,
                               TrainConfig config,
                               const TrainCallback& on_eval = {});

/// CSV with header step,bce,eikonal,accuracy,grad_norm.
std::string metrics_to_csv(const std::vector<MetricsReport>& reports);

}  // namespace jsdf
