#include "jsdf/field.hpp"

#include <cmath>
#include <stdexcept>

#include <json.hpp>

#include "jsdf/formats.hpp"
#include "jsdf/kinematics.hpp"
#include "jsdf/rng.hpp"

namespace jsdf {

double sigmoid(double z) {
  if (z >= 0.0) {
    return 1.0 / (1.0 + std::exp(-z));
  }
  const double e = std::exp(z);
  return e / (1.0 + e);
}

namespace {

Eigen::MatrixXd lrelu(const Eigen::MatrixXd& t, double slope) {
  return t.array().max(slope * t.array()).matrix();
}

Eigen::MatrixXd lrelu_mask(const Eigen::MatrixXd& t, double slope) {
  return t.unaryExpr([slope](double v) { return v > 0.0 ? 1.0 : slope; });
}

Eigen::MatrixXd affine(const Eigen::MatrixXd& x, const DenseLayer& layer) {
  Eigen::MatrixXd out = x * layer.W.transpose();
  out.rowwise() += layer.b.transpose();
  return out;
}

int encoder_input_dim(const FieldParams& p, int k) {
  return k == 0 ? 1 : 1 + p.config.feature_dim;
}

void validate_config(const FieldConfig& c) {
  if (c.feature_dim <= 0 || c.encoder_hidden <= 0 || c.trunk_width <= 0 ||
      c.trunk_layers <= 0) {
    throw std::invalid_argument("field dimensions must be positive");
  }
  if (!(c.leaky_slope > 0.0 && c.leaky_slope < 1.0)) {
    throw std::invalid_argument("leaky slope must be in (0, 1)");
  }
}

double stable_bce(double z, double c) {
  // BCE(sigmoid(z), c) without overflow.
  return std::max(z, 0.0) - z * c + std::log1p(std::exp(-std::abs(z)));
}

}  // namespace

FieldParams init_field(const RobotModel& model, const FieldConfig& config,
                       std::uint64_t seed, const std::string& scene_id) {
  validate_config(config);
  validate_model(model);
  FieldParams p;
  p.config = config;
  p.joint_count = model.joint_count();
  p.parent.resize(p.joint_count);
  for (int k = 0; k < p.joint_count; ++k) p.parent[k] = model.joints[k].parent;
  p.limit_lo = model.limits_lo();
  p.limit_hi = model.limits_hi();
  p.scene_id = scene_id;
  p.seed = seed;
  p.rho = std::log(10.0);

  Rng rng(seed);
  auto init_layer = [&rng](int out, int in) {
    DenseLayer layer;
    layer.W.resize(out, in);
    layer.b.resize(out);
    const double bound = 1.0 / std::sqrt(static_cast<double>(in));
    for (Eigen::Index i = 0; i < layer.W.size(); ++i) {
      layer.W.data()[i] = rng.uniform(-bound, bound);
    }
    for (Eigen::Index i = 0; i < layer.b.size(); ++i) {
      layer.b[i] = rng.uniform(-bound, bound);
    }
    return layer;
  };

  const int K = p.joint_count;
  const int ell = config.feature_dim;
  if (config.variant == EncoderVariant::kHierarchical) {
    for (int k = 0; k < K; ++k) {
      p.enc1.push_back(
          init_layer(config.encoder_hidden, encoder_input_dim(p, k)));
      p.enc2.push_back(init_layer(ell, config.encoder_hidden));
    }
  } else {
    p.flat = init_layer(ell * K, K);
  }
  p.trunk.push_back(init_layer(config.trunk_width, ell * K));
  for (int i = 1; i < config.trunk_layers; ++i) {
    p.trunk.push_back(init_layer(config.trunk_width, config.trunk_width));
  }
  p.trunk.push_back(init_layer(1, config.trunk_width));
  return p;
}

FieldBatch forward_field(const FieldParams& p, const Eigen::MatrixXd& thetas) {
  const int K = p.joint_count;
  if (thetas.cols() != K) {
    throw std::invalid_argument("pose batch has wrong joint count");
  }
  const double slope = p.config.leaky_slope;
  const int ell = p.config.feature_dim;
  const Eigen::Index N = thetas.rows();

  FieldBatch fb;
  fb.dx_dtheta = (2.0 / (p.limit_hi - p.limit_lo).array()).transpose();
  fb.X.resize(N, K);
  for (int k = 0; k < K; ++k) {
    fb.X.col(k) =
        (thetas.col(k).array() - p.limit_lo[k]) * fb.dx_dtheta[k] - 1.0;
  }

  if (p.config.variant == EncoderVariant::kHierarchical) {
    fb.enc_U.resize(K);
    fb.enc_A.resize(K);
    fb.enc_H.resize(K);
    fb.enc_C.resize(K);
    fb.enc_Nu.resize(K);
    Eigen::MatrixXd z0(N, ell * K);
    for (int k = 0; k < K; ++k) {
      fb.enc_U[k].resize(N, encoder_input_dim(p, k));
      fb.enc_U[k].col(0) = fb.X.col(k);
      if (k > 0) {
        fb.enc_U[k].rightCols(ell) = fb.enc_Nu[p.parent[k]];
      }
      fb.enc_A[k] = affine(fb.enc_U[k], p.enc1[k]);
      fb.enc_H[k] = lrelu(fb.enc_A[k], slope);
      fb.enc_C[k] = affine(fb.enc_H[k], p.enc2[k]);
      fb.enc_Nu[k] = lrelu(fb.enc_C[k], slope);
      z0.middleCols(k * ell, ell) = fb.enc_Nu[k];
    }
    fb.zs.push_back(std::move(z0));
  } else {
    fb.zs.push_back(affine(fb.X, p.flat));
  }

  const int L = p.config.trunk_layers;
  for (int i = 0; i < L; ++i) {
    fb.ts.push_back(affine(fb.zs[i], p.trunk[i]));
    fb.zs.push_back(lrelu(fb.ts[i], slope));
  }
  fb.g = affine(fb.zs[L], p.trunk[L]).col(0);
  return fb;
}

Eigen::MatrixXd input_gradients(const FieldParams& p, const FieldBatch& fb) {
  const int K = p.joint_count;
  const int ell = p.config.feature_dim;
  const int L = p.config.trunk_layers;
  const double slope = p.config.leaky_slope;
  const Eigen::Index N = fb.X.rows();

  // dg/d(hidden activations), walked down from the output to the features.
  Eigen::MatrixXd r = Eigen::VectorXd::Ones(N) * p.trunk[L].W;
  for (int i = L - 1; i >= 0; --i) {
    r = (r.array() * lrelu_mask(fb.ts[i], slope).array()).matrix() *
        p.trunk[i].W;
  }

  Eigen::MatrixXd dX(N, K);
  if (p.config.variant == EncoderVariant::kHierarchical) {
    std::vector<Eigen::MatrixXd> e(K);
    for (int k = 0; k < K; ++k) e[k] = r.middleCols(k * ell, ell);
    for (int k = K - 1; k >= 0; --k) {
      const Eigen::MatrixXd mc =
          (e[k].array() * lrelu_mask(fb.enc_C[k], slope).array()).matrix();
      const Eigen::MatrixXd hh = mc * p.enc2[k].W;
      const Eigen::MatrixXd pa =
          (hh.array() * lrelu_mask(fb.enc_A[k], slope).array()).matrix();
      const Eigen::MatrixXd gu = pa * p.enc1[k].W;
      dX.col(k) = gu.col(0);
      if (k > 0) e[p.parent[k]] += gu.rightCols(ell);
    }
  } else {
    dX = r * p.flat.W;
  }
  return (dX.array().rowwise() * fb.dx_dtheta.array()).matrix();
}

FieldEval evaluate_field(const FieldParams& p, const RobotModel& model,
                         const Pose& pose) {
  check_model_compatible(p, model);
  validate_pose(model, pose, LimitPolicy::kReject);
  const FieldBatch fb = forward_field(p, pose.transpose());

  auto check = [](const Eigen::MatrixXd& m, const std::string& where) {
    if (!m.allFinite()) {
      throw std::runtime_error("non-finite value in " + where);
    }
  };
  if (p.config.variant == EncoderVariant::kHierarchical) {
    for (int k = 0; k < p.joint_count; ++k) {
      check(fb.enc_A[k], "encoder " + std::to_string(k + 1) + " hidden layer");
      check(fb.enc_C[k], "encoder " + std::to_string(k + 1) + " output layer");
    }
  }
  for (std::size_t i = 0; i < fb.ts.size(); ++i) {
    check(fb.ts[i], "trunk layer " + std::to_string(i + 1));
  }
  check(fb.g, "trunk output layer");

  FieldEval out;
  out.g = fb.g[0];
  out.f = sigmoid(p.scale() * out.g);
  out.grad_theta = input_gradients(p, fb).row(0).transpose();
  if (!out.grad_theta.allFinite()) {
    throw std::runtime_error("non-finite value in input gradient");
  }
  return out;
}

FieldGradients zero_gradients(const FieldParams& p) {
  FieldGradients g;
  auto zero_of = [](const DenseLayer& l) {
    return DenseLayer{Eigen::MatrixXd::Zero(l.W.rows(), l.W.cols()),
                      Eigen::VectorXd::Zero(l.b.size())};
  };
  for (const DenseLayer& l : p.enc1) g.enc1.push_back(zero_of(l));
  for (const DenseLayer& l : p.enc2) g.enc2.push_back(zero_of(l));
  if (p.config.variant == EncoderVariant::kFlattened) {
    g.flat = zero_of(p.flat);
  }
  for (const DenseLayer& l : p.trunk) g.trunk.push_back(zero_of(l));
  g.rho = 0.0;
  return g;
}

namespace {

// Reverse pass for a per-row dL/dg, accumulating parameter gradients.
// Returns dL/dZ0 for the encoder sweep.
Eigen::MatrixXd backward_trunk(const FieldParams& p, const FieldBatch& fb,
                               const Eigen::VectorXd& dg,
                               FieldGradients& grads) {
  const int L = p.config.trunk_layers;
  const double slope = p.config.leaky_slope;
  grads.trunk[L].W += dg.transpose() * fb.zs[L];
  grads.trunk[L].b[0] += dg.sum();
  Eigen::MatrixXd r = dg * p.trunk[L].W;
  for (int i = L - 1; i >= 0; --i) {
    const Eigen::MatrixXd pm =
        (r.array() * lrelu_mask(fb.ts[i], slope).array()).matrix();
    grads.trunk[i].W += pm.transpose() * fb.zs[i];
    grads.trunk[i].b += pm.colwise().sum().transpose();
    r = pm * p.trunk[i].W;
  }
  return r;
}

void backward_encoders(const FieldParams& p, const FieldBatch& fb,
                       const Eigen::MatrixXd& dz0, FieldGradients& grads) {
  const double slope = p.config.leaky_slope;
  const int K = p.joint_count;
  const int ell = p.config.feature_dim;
  if (p.config.variant == EncoderVariant::kFlattened) {
    grads.flat.W += dz0.transpose() * fb.X;
    grads.flat.b += dz0.colwise().sum().transpose();
    return;
  }
  std::vector<Eigen::MatrixXd> e(K);
  for (int k = 0; k < K; ++k) e[k] = dz0.middleCols(k * ell, ell);
  for (int k = K - 1; k >= 0; --k) {
    const Eigen::MatrixXd mc =
        (e[k].array() * lrelu_mask(fb.enc_C[k], slope).array()).matrix();
    grads.enc2[k].W += mc.transpose() * fb.enc_H[k];
    grads.enc2[k].b += mc.colwise().sum().transpose();
    const Eigen::MatrixXd hh = mc * p.enc2[k].W;
    const Eigen::MatrixXd pa =
        (hh.array() * lrelu_mask(fb.enc_A[k], slope).array()).matrix();
    grads.enc1[k].W += pa.transpose() * fb.enc_U[k];
    grads.enc1[k].b += pa.colwise().sum().transpose();
    if (k > 0) {
      e[p.parent[k]] += (pa * p.enc1[k].W).rightCols(ell);
    }
  }
}

// Gradient of sum_i v_i . (dg/dtheta)_i with v held constant: a tangent
// (forward-mode) pass through the network reusing the primal activation
// masks, then a reverse sweep over the tangent variables. Masks are treated
// as locally constant, so biases receive no contribution from this term.
void eikonal_backward(const FieldParams& p, const FieldBatch& fb,
                      const Eigen::MatrixXd& v, FieldGradients& grads) {
  const int K = p.joint_count;
  const int ell = p.config.feature_dim;
  const int L = p.config.trunk_layers;
  const double slope = p.config.leaky_slope;
  const Eigen::Index N = fb.X.rows();

  const Eigen::MatrixXd xdot =
      (v.array().rowwise() * fb.dx_dtheta.array()).matrix();

  std::vector<Eigen::MatrixXd> udot(K), hdot(K), nudot(K);
  std::vector<Eigen::MatrixXd> zdot;
  if (p.config.variant == EncoderVariant::kHierarchical) {
    Eigen::MatrixXd z0dot(N, ell * K);
    for (int k = 0; k < K; ++k) {
      udot[k].resize(N, encoder_input_dim(p, k));
      udot[k].col(0) = xdot.col(k);
      if (k > 0) udot[k].rightCols(ell) = nudot[p.parent[k]];
      const Eigen::MatrixXd adot = udot[k] * p.enc1[k].W.transpose();
      hdot[k] =
          (adot.array() * lrelu_mask(fb.enc_A[k], slope).array()).matrix();
      const Eigen::MatrixXd cdot = hdot[k] * p.enc2[k].W.transpose();
      nudot[k] =
          (cdot.array() * lrelu_mask(fb.enc_C[k], slope).array()).matrix();
      z0dot.middleCols(k * ell, ell) = nudot[k];
    }
    zdot.push_back(std::move(z0dot));
  } else {
    zdot.push_back(xdot * p.flat.W.transpose());
  }
  for (int i = 0; i < L; ++i) {
    const Eigen::MatrixXd tdot = zdot[i] * p.trunk[i].W.transpose();
    zdot.push_back(
        (tdot.array() * lrelu_mask(fb.ts[i], slope).array()).matrix());
  }

  // Reverse sweep; the adjoint of every row's tangent output is one.
  grads.trunk[L].W += zdot[L].colwise().sum();
  Eigen::MatrixXd mz = Eigen::VectorXd::Ones(N) * p.trunk[L].W;
  for (int i = L - 1; i >= 0; --i) {
    const Eigen::MatrixXd mt =
        (mz.array() * lrelu_mask(fb.ts[i], slope).array()).matrix();
    grads.trunk[i].W += mt.transpose() * zdot[i];
    mz = mt * p.trunk[i].W;
  }
  if (p.config.variant == EncoderVariant::kFlattened) {
    grads.flat.W += mz.transpose() * xdot;
    return;
  }
  std::vector<Eigen::MatrixXd> mnu(K);
  for (int k = 0; k < K; ++k) mnu[k] = mz.middleCols(k * ell, ell);
  for (int k = K - 1; k >= 0; --k) {
    const Eigen::MatrixXd mcd =
        (mnu[k].array() * lrelu_mask(fb.enc_C[k], slope).array()).matrix();
    grads.enc2[k].W += mcd.transpose() * hdot[k];
    const Eigen::MatrixXd mh = mcd * p.enc2[k].W;
    const Eigen::MatrixXd ma =
        (mh.array() * lrelu_mask(fb.enc_A[k], slope).array()).matrix();
    grads.enc1[k].W += ma.transpose() * udot[k];
    if (k > 0) {
      mnu[p.parent[k]] += (ma * p.enc1[k].W).rightCols(ell);
    }
  }
}

}  // namespace

FieldLoss loss_param_gradients(const FieldParams& p,
                               const Eigen::MatrixXd& thetas,
                               const Eigen::VectorXd& labels,
                               const Eigen::MatrixXd& eik_thetas, double alpha,
                               Eigen::VectorXd* grad_out) {
  if (thetas.rows() == 0) {
    throw std::invalid_argument("loss needs a nonempty batch");
  }
  if (alpha < 0.0) {
    throw std::invalid_argument("alpha must be >= 0");
  }
  if (alpha > 0.0 && eik_thetas.rows() == 0) {
    throw std::invalid_argument("eikonal term enabled but no points given");
  }

  FieldGradients grads = zero_gradients(p);
  const Eigen::Index N = thetas.rows();
  const double s = p.scale();

  const FieldBatch fb = forward_field(p, thetas);
  FieldLoss loss;
  Eigen::VectorXd dg(N);
  double drho = 0.0;
  for (Eigen::Index i = 0; i < N; ++i) {
    const double z = s * fb.g[i];
    const double c = labels[i];
    loss.bce += stable_bce(z, c);
    const double dz = sigmoid(z) - c;
    dg[i] = dz * s / static_cast<double>(N);
    drho += dz * fb.g[i] * s / static_cast<double>(N);
  }
  loss.bce /= static_cast<double>(N);
  grads.rho += drho;
  const Eigen::MatrixXd dz0 = backward_trunk(p, fb, dg, grads);
  backward_encoders(p, fb, dz0, grads);

  if (alpha > 0.0) {
    const FieldBatch fe = forward_field(p, eik_thetas);
    const Eigen::MatrixXd g_theta = input_gradients(p, fe);
    const Eigen::Index M = eik_thetas.rows();
    Eigen::MatrixXd v(M, p.joint_count);
    for (Eigen::Index i = 0; i < M; ++i) {
      const double nrm = g_theta.row(i).norm();
      const double resid = nrm - 1.0;
      loss.eikonal += resid * resid;
      if (nrm > 1e-12) {
        v.row(i) = (alpha * 2.0 * resid / (nrm * static_cast<double>(M))) *
                   g_theta.row(i);
      } else {
        v.row(i).setZero();
      }
    }
    loss.eikonal /= static_cast<double>(M);
    eikonal_backward(p, fe, v, grads);
  }

  loss.total = loss.bce + alpha * loss.eikonal;
  if (grad_out != nullptr) {
    *grad_out = pack_gradients(grads, p);
  }
  return loss;
}

FieldLoss loss_param_gradients(const FieldParams& p, const RobotModel& model,
                               const std::vector<LabeledPose>& batch,
                               const std::vector<Pose>& eik_points,
                               double alpha, Eigen::VectorXd* grad_out) {
  check_model_compatible(p, model);
  Eigen::MatrixXd thetas(batch.size(), p.joint_count);
  Eigen::VectorXd labels(batch.size());
  for (std::size_t i = 0; i < batch.size(); ++i) {
    thetas.row(i) = batch[i].theta.transpose();
    labels[i] = batch[i].label;
  }
  Eigen::MatrixXd eik(eik_points.size(), p.joint_count);
  for (std::size_t i = 0; i < eik_points.size(); ++i) {
    eik.row(i) = eik_points[i].transpose();
  }
  return loss_param_gradients(p, thetas, labels, eik, alpha, grad_out);
}

double l1_loss_gradients(const FieldParams& p, const Eigen::MatrixXd& thetas,
                         const Eigen::VectorXd& targets,
                         Eigen::VectorXd* grad_out) {
  if (thetas.rows() == 0) {
    throw std::invalid_argument("loss needs a nonempty batch");
  }
  FieldGradients grads = zero_gradients(p);
  const Eigen::Index N = thetas.rows();
  const FieldBatch fb = forward_field(p, thetas);
  double loss = 0.0;
  Eigen::VectorXd dg(N);
  for (Eigen::Index i = 0; i < N; ++i) {
    const double r = fb.g[i] - targets[i];
    loss += std::abs(r);
    dg[i] = (r > 0.0 ? 1.0 : (r < 0.0 ? -1.0 : 0.0)) / static_cast<double>(N);
  }
  loss /= static_cast<double>(N);
  const Eigen::MatrixXd dz0 = backward_trunk(p, fb, dg, grads);
  backward_encoders(p, fb, dz0, grads);
  if (grad_out != nullptr) {
    *grad_out = pack_gradients(grads, p);
  }
  return loss;
}

namespace {

template <typename Params, typename Fn>
void visit_layers(Params& p, EncoderVariant variant, int joint_count,
                  Fn&& fn) {
  if (variant == EncoderVariant::kHierarchical) {
    for (int k = 0; k < joint_count; ++k) {
      fn(p.enc1[k]);
      fn(p.enc2[k]);
    }
  } else {
    fn(p.flat);
  }
  for (auto& l : p.trunk) fn(l);
}

}  // namespace

int param_count(const FieldParams& p) {
  int total = 1;  // rho
  visit_layers(p, p.config.variant, p.joint_count, [&](const DenseLayer& l) {
    total += static_cast<int>(l.W.size() + l.b.size());
  });
  return total;
}

Eigen::VectorXd pack(const FieldParams& p) {
  Eigen::VectorXd v(param_count(p));
  Eigen::Index at = 0;
  visit_layers(p, p.config.variant, p.joint_count, [&](const DenseLayer& l) {
    v.segment(at, l.W.size()) =
        Eigen::Map<const Eigen::VectorXd>(l.W.data(), l.W.size());
    at += l.W.size();
    v.segment(at, l.b.size()) = l.b;
    at += l.b.size();
  });
  v[at] = p.rho;
  return v;
}

void unpack(FieldParams& p, const Eigen::VectorXd& v) {
  if (v.size() != param_count(p)) {
    throw std::invalid_argument("parameter vector has wrong length");
  }
  Eigen::Index at = 0;
  visit_layers(p, p.config.variant, p.joint_count, [&](DenseLayer& l) {
    Eigen::Map<Eigen::VectorXd>(l.W.data(), l.W.size()) =
        v.segment(at, l.W.size());
    at += l.W.size();
    l.b = v.segment(at, l.b.size());
    at += l.b.size();
  });
  p.rho = v[at];
}

Eigen::VectorXd pack_gradients(const FieldGradients& g,
                               const FieldParams& shape) {
  Eigen::VectorXd v(param_count(shape));
  Eigen::Index at = 0;
  visit_layers(g, shape.config.variant, shape.joint_count,
               [&](const DenseLayer& l) {
                 v.segment(at, l.W.size()) = Eigen::Map<const Eigen::VectorXd>(
                     l.W.data(), l.W.size());
                 at += l.W.size();
                 v.segment(at, l.b.size()) = l.b;
                 at += l.b.size();
               });
  v[at] = g.rho;
  return v;
}

void check_model_compatible(const FieldParams& p, const RobotModel& model) {
  if (p.joint_count != model.joint_count()) {
    throw std::invalid_argument(
        "checkpoint was trained for K=" + std::to_string(p.joint_count) +
        ", robot has K=" + std::to_string(model.joint_count()));
  }
  for (int k = 0; k < p.joint_count; ++k) {
    if (p.parent[k] != model.joints[k].parent) {
      throw std::invalid_argument(
          "checkpoint joint hierarchy does not match the robot");
    }
  }
  if ((p.limit_lo - model.limits_lo()).cwiseAbs().maxCoeff() > 1e-12 ||
      (p.limit_hi - model.limits_hi()).cwiseAbs().maxCoeff() > 1e-12) {
    throw std::invalid_argument(
        "checkpoint joint limits do not match the robot");
  }
}

namespace {

nlohmann::json matrix_to_json(const Eigen::MatrixXd& m) {
  nlohmann::json rows = nlohmann::json::array();
  for (Eigen::Index r = 0; r < m.rows(); ++r) {
    nlohmann::json row = nlohmann::json::array();
    for (Eigen::Index c = 0; c < m.cols(); ++c) row.push_back(m(r, c));
    rows.push_back(std::move(row));
  }
  return rows;
}

Eigen::MatrixXd matrix_from_json(const nlohmann::json& rows) {
  const Eigen::Index r = rows.size();
  const Eigen::Index c = r > 0 ? rows[0].size() : 0;
  Eigen::MatrixXd m(r, c);
  for (Eigen::Index i = 0; i < r; ++i) {
    if (static_cast<Eigen::Index>(rows[i].size()) != c) {
      throw std::runtime_error("ragged matrix in checkpoint");
    }
    for (Eigen::Index j = 0; j < c; ++j) m(i, j) = rows[i][j].get<double>();
  }
  return m;
}

nlohmann::json vector_to_json(const Eigen::VectorXd& v) {
  nlohmann::json arr = nlohmann::json::array();
  for (Eigen::Index i = 0; i < v.size(); ++i) arr.push_back(v[i]);
  return arr;
}

Eigen::VectorXd vector_from_json(const nlohmann::json& arr) {
  Eigen::VectorXd v(arr.size());
  for (std::size_t i = 0; i < arr.size(); ++i) v[i] = arr[i].get<double>();
  return v;
}

nlohmann::json layer_to_json(const DenseLayer& l) {
  return {{"w", matrix_to_json(l.W)}, {"b", vector_to_json(l.b)}};
}

DenseLayer layer_from_json(const nlohmann::json& j) {
  return DenseLayer{matrix_from_json(j.at("w")), vector_from_json(j.at("b"))};
}

}  // namespace

std::string checkpoint_to_json(const FieldParams& p) {
  nlohmann::json j;
  j["version"] = 1;
  j["k"] = p.joint_count;
  nlohmann::json dims;
  dims["feature_dim"] = p.config.feature_dim;
  dims["encoder_hidden"] = p.config.encoder_hidden;
  dims["trunk_width"] = p.config.trunk_width;
  dims["trunk_layers"] = p.config.trunk_layers;
  dims["variant"] = p.config.variant == EncoderVariant::kHierarchical
                        ? "hierarchical"
                        : "flattened";
  dims["parent"] = p.parent;
  dims["limit_lo"] = vector_to_json(p.limit_lo);
  dims["limit_hi"] = vector_to_json(p.limit_hi);
  j["dims"] = dims;
  j["lambda"] = p.config.leaky_slope;
  j["rho"] = p.rho;
  nlohmann::json arrays;
  if (p.config.variant == EncoderVariant::kHierarchical) {
    nlohmann::json encs = nlohmann::json::array();
    for (int k = 0; k < p.joint_count; ++k) {
      encs.push_back({{"l1", layer_to_json(p.enc1[k])},
                      {"l2", layer_to_json(p.enc2[k])}});
    }
    arrays["encoders"] = encs;
  } else {
    arrays["flat"] = layer_to_json(p.flat);
  }
  nlohmann::json trunk = nlohmann::json::array();
  for (const DenseLayer& l : p.trunk) trunk.push_back(layer_to_json(l));
  arrays["trunk"] = trunk;
  j["arrays"] = arrays;
  j["scene_id"] = p.scene_id;
  j["seed"] = p.seed;
  return j.dump();
}

FieldParams checkpoint_from_json(const std::string& text) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(text);
  } catch (const nlohmann::json::exception& e) {
    throw std::runtime_error(std::string("invalid checkpoint: ") + e.what());
  }
  if (j.at("version").get<int>() != 1) {
    throw std::runtime_error("unsupported checkpoint version");
  }
  FieldParams p;
  p.joint_count = j.at("k").get<int>();
  const nlohmann::json& dims = j.at("dims");
  p.config.feature_dim = dims.at("feature_dim").get<int>();
  p.config.encoder_hidden = dims.at("encoder_hidden").get<int>();
  p.config.trunk_width = dims.at("trunk_width").get<int>();
  p.config.trunk_layers = dims.at("trunk_layers").get<int>();
  const std::string variant = dims.at("variant").get<std::string>();
  if (variant == "hierarchical") {
    p.config.variant = EncoderVariant::kHierarchical;
  } else if (variant == "flattened") {
    p.config.variant = EncoderVariant::kFlattened;
  } else {
    throw std::runtime_error("unknown encoder variant: " + variant);
  }
  p.parent = dims.at("parent").get<std::vector<int>>();
  p.limit_lo = vector_from_json(dims.at("limit_lo"));
  p.limit_hi = vector_from_json(dims.at("limit_hi"));
  if (static_cast<int>(p.parent.size()) != p.joint_count ||
      p.limit_lo.size() != p.joint_count ||
      p.limit_hi.size() != p.joint_count) {
    throw std::runtime_error("checkpoint dims do not match k");
  }
  p.config.leaky_slope = j.at("lambda").get<double>();
  p.rho = j.at("rho").get<double>();
  const nlohmann::json& arrays = j.at("arrays");
  if (p.config.variant == EncoderVariant::kHierarchical) {
    for (const nlohmann::json& e : arrays.at("encoders")) {
      p.enc1.push_back(layer_from_json(e.at("l1")));
      p.enc2.push_back(layer_from_json(e.at("l2")));
    }
    if (static_cast<int>(p.enc1.size()) != p.joint_count) {
      throw std::runtime_error("checkpoint encoder count does not match k");
    }
  } else {
    p.flat = layer_from_json(arrays.at("flat"));
  }
  for (const nlohmann::json& l : arrays.at("trunk")) {
    p.trunk.push_back(layer_from_json(l));
  }
  if (static_cast<int>(p.trunk.size()) != p.config.trunk_layers + 1) {
    throw std::runtime_error("checkpoint trunk depth does not match dims");
  }
  p.scene_id = j.at("scene_id").get<std::string>();
  p.seed = j.at("seed").get<std::uint64_t>();
  validate_config(p.config);
  return p;
}

void save_checkpoint(const FieldParams& p, const std::string& path) {
  write_file(path, checkpoint_to_json(p));
}

FieldParams load_checkpoint(const std::string& path) {
  return checkpoint_from_json(read_file(path));
}

}  // namespace jsdf
