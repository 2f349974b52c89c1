#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "jsdf/dataset.hpp"
#include "jsdf/robot.hpp"

namespace jsdf {

enum class EncoderVariant { kHierarchical, kFlattened };

struct FieldConfig {
  int feature_dim = 8;      // per-joint feature width
  int encoder_hidden = 32;  // per-joint encoder hidden width
  int trunk_width = 512;
  int trunk_layers = 4;  // hidden layers
  double leaky_slope = 0.01;
  EncoderVariant variant = EncoderVariant::kHierarchical;
};

struct DenseLayer {
  Eigen::MatrixXd W;  // out x in
  Eigen::VectorXd b;
};

/// Learnable collision field g plus classifier f = sigmoid(exp(rho) * g).
/// Joint inputs are limit-normalized to [-1, 1]; the limits are captured at
/// init time and stored with the parameters so checkpoints are portable.
struct FieldParams {
  FieldConfig config;
  int joint_count = 0;
  std::vector<int> parent;  // parent joint index per joint, -1 for the root
  Eigen::VectorXd limit_lo, limit_hi;
  std::vector<DenseLayer> enc1, enc2;  // hierarchical per-joint encoders
  DenseLayer flat;                     // flattened single linear encoder
  std::vector<DenseLayer> trunk;       // trunk_layers hidden + output layer
  double rho = 0.0;                    // log of the sigmoid scale s
  std::string scene_id;
  std::uint64_t seed = 0;

  double scale() const { return std::exp(rho); }
};

/// Fan-in-scaled uniform init, rho = ln(10), deterministic from seed.
FieldParams init_field(const RobotModel& model, const FieldConfig& config,
                       std::uint64_t seed, const std::string& scene_id = "");

/// Forward cache for a batch of poses (rows of `thetas`).
struct FieldBatch {
  Eigen::MatrixXd X;            // normalized inputs, N x K
  Eigen::RowVectorXd dx_dtheta; // 2 / (hi - lo)
  std::vector<Eigen::MatrixXd> enc_U, enc_A, enc_H, enc_C, enc_Nu;
  std::vector<Eigen::MatrixXd> zs;  // zs[0] = features, zs[i>0] = hidden acts
  std::vector<Eigen::MatrixXd> ts;  // hidden pre-activations
  Eigen::VectorXd g;
};

FieldBatch forward_field(const FieldParams& params,
                         const Eigen::MatrixXd& thetas);

/// Exact reverse-mode d g / d theta for every row of the batch (N x K).
Eigen::MatrixXd input_gradients(const FieldParams& params,
                                const FieldBatch& fb);

struct FieldEval {
  double g = 0.0;
  double f = 0.0;
  Eigen::VectorXd grad_theta;
};

/// Single-pose evaluation with per-layer finite checks and limit validation.
FieldEval evaluate_field(const FieldParams& params, const RobotModel& model,
                         const Pose& pose);

struct FieldGradients {
  std::vector<DenseLayer> enc1, enc2;
  DenseLayer flat;
  std::vector<DenseLayer> trunk;
  double rho = 0.0;
};

FieldGradients zero_gradients(const FieldParams& params);

struct FieldLoss {
  double total = 0.0;
  double bce = 0.0;
  double eikonal = 0.0;  // unweighted mean (|grad g| - 1)^2
};

/// Loss = mean BCE(f, c) over the batch + alpha * mean (|dg/dtheta| - 1)^2
/// over eik_thetas, with the full parameter gradient including the
/// double-backward through the input-gradient term. Activation masks from
/// the forward pass are treated as locally constant, which makes the second
/// differentiation exact almost everywhere for piecewise-linear activations.
FieldLoss loss_param_gradients(const FieldParams& params,
                               const Eigen::MatrixXd& thetas,
                               const Eigen::VectorXd& labels,
                               const Eigen::MatrixXd& eik_thetas, double alpha,
                               Eigen::VectorXd* grad_out);

/// Convenience overload matching the dataset types.
FieldLoss loss_param_gradients(const FieldParams& params,
                               const RobotModel& model,
                               const std::vector<LabeledPose>& batch,
                               const std::vector<Pose>& eik_points,
                               double alpha, Eigen::VectorXd* grad_out);

/// L1 regression of g against distance labels (no sigmoid, no Eikonal term).
double l1_loss_gradients(const FieldParams& params,
                         const Eigen::MatrixXd& thetas,
                         const Eigen::VectorXd& targets,
                         Eigen::VectorXd* grad_out);

// Flat parameter vector in canonical order (encoders, trunk, rho last).
int param_count(const FieldParams& params);
Eigen::VectorXd pack(const FieldParams& params);
void unpack(FieldParams& params, const Eigen::VectorXd& v);
Eigen::VectorXd pack_gradients(const FieldGradients& grads,
                               const FieldParams& shape);

/// JSON checkpoint, bit-exact round trip.
std::string checkpoint_to_json(const FieldParams& params);
FieldParams checkpoint_from_json(const std::string& text);
void save_checkpoint(const FieldParams& params, const std::string& path);
FieldParams load_checkpoint(const std::string& path);

/// Throws when the checkpoint was built for a different robot (K or limits).
void check_model_compatible(const FieldParams& params,
                            const RobotModel& model);

double sigmoid(double z);

}  // namespace jsdf
