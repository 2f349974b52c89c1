#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <limits>

#include "jsdf/field.hpp"
#include "jsdf/kinematics.hpp"
#include "jsdf/rng.hpp"

using namespace jsdf;

namespace {

RobotModel chain_model(int k_count, double lo = -2.0, double hi = 2.0) {
  RobotModel m;
  for (int k = 0; k < k_count; ++k) {
    Joint j;
    j.parent = k - 1;
    j.origin = k == 0 ? Transform::identity()
                      : translation(Eigen::Vector3d(0.3, 0.0, 0.0));
    j.axis = Eigen::Vector3d::UnitZ();
    j.lo = lo;
    j.hi = hi;
    m.joints.push_back(j);
  }
  m.link_capsules.resize(k_count + 1);
  for (int l = 1; l <= k_count; ++l) {
    m.link_capsules[l].push_back(
        Capsule{Eigen::Vector3d::Zero(), Eigen::Vector3d(0.3, 0, 0), 0.05});
  }
  validate_model(m);
  return m;
}

// Branching 5-joint tree: 0 <- 1 <- 2, 0 <- 3 <- 4.
RobotModel tree_model() {
  RobotModel m = chain_model(5);
  m.joints[3].parent = 0;
  m.joints[4].parent = 3;
  validate_model(m);
  return m;
}

double min_preactivation_magnitude(const FieldParams& p,
                                   const Eigen::MatrixXd& thetas) {
  const FieldBatch fb = forward_field(p, thetas);
  double margin = std::numeric_limits<double>::infinity();
  if (p.config.variant == EncoderVariant::kHierarchical) {
    for (int k = 0; k < p.joint_count; ++k) {
      margin = std::min(margin, fb.enc_A[k].cwiseAbs().minCoeff());
      margin = std::min(margin, fb.enc_C[k].cwiseAbs().minCoeff());
    }
  }
  for (const Eigen::MatrixXd& t : fb.ts) {
    margin = std::min(margin, t.cwiseAbs().minCoeff());
  }
  return margin;
}

Eigen::MatrixXd random_poses(Rng& rng, const RobotModel& m, int n) {
  Eigen::MatrixXd thetas(n, m.joint_count());
  const Eigen::VectorXd lo = m.limits_lo(), hi = m.limits_hi();
  for (int i = 0; i < n; ++i) {
    thetas.row(i) = rng.uniform_vector(lo, hi).transpose();
  }
  return thetas;
}

// rtol + atol comparison; the atol absorbs the central-difference noise
// floor on near-zero gradients.
bool grad_close(double a, double b, double rtol, double atol) {
  return std::abs(a - b) <= rtol * std::max(std::abs(a), std::abs(b)) + atol;
}

FieldConfig small_config(EncoderVariant variant) {
  FieldConfig c;
  c.feature_dim = 6;
  c.encoder_hidden = 8;
  c.trunk_width = 24;
  c.trunk_layers = 4;
  c.variant = variant;
  return c;
}

}  // namespace

TEST_CASE("init is deterministic and has the documented shape") {
  const RobotModel m = chain_model(6);
  FieldConfig cfg;  // defaults: ell = 8, trunk 4 x 512
  const FieldParams a = init_field(m, cfg, 99);
  const FieldParams b = init_field(m, cfg, 99);
  CHECK(pack(a) == pack(b));
  CHECK(a.trunk[0].W.cols() == 48);  // ell * K
  CHECK(a.trunk[0].W.rows() == 512);
  // s = exp(ln 10); equals 10 up to the last bits of this libm
  CHECK(std::abs(a.scale() - 10.0) <= 8 * std::numeric_limits<double>::epsilon() * 10.0);
  const FieldParams c = init_field(m, cfg, 100);
  CHECK(pack(a) != pack(c));
}

TEST_CASE("input gradients match central finite differences") {
  for (const auto variant :
       {EncoderVariant::kHierarchical, EncoderVariant::kFlattened}) {
    Rng rng(variant == EncoderVariant::kHierarchical ? 2024 : 2025);
    const RobotModel m = tree_model();
    int checked = 0;
    int net_seed = 500;
    while (checked < 100) {
      const FieldParams p =
          init_field(m, small_config(variant), net_seed++);
      for (int trial = 0; trial < 10 && checked < 100; ++trial) {
        Eigen::MatrixXd theta = random_poses(rng, m, 1);
        if (min_preactivation_magnitude(p, theta) < 1e-3) continue;
        const Eigen::MatrixXd grad =
            input_gradients(p, forward_field(p, theta));
        const double h = 1e-5;
        for (int k = 0; k < m.joint_count(); ++k) {
          Eigen::MatrixXd tp = theta, tm = theta;
          tp(0, k) += h;
          tm(0, k) -= h;
          const double fd = (forward_field(p, tp).g[0] -
                             forward_field(p, tm).g[0]) /
                            (2.0 * h);
          CHECK(grad_close(grad(0, k), fd, 1e-4, 1e-9));
        }
        ++checked;
      }
    }
  }
}

TEST_CASE("full loss parameter gradient matches finite differences") {
  for (const auto variant :
       {EncoderVariant::kHierarchical, EncoderVariant::kFlattened}) {
    const RobotModel m = chain_model(2);
    FieldConfig cfg;
    cfg.feature_dim = 4;
    cfg.encoder_hidden = 4;
    cfg.trunk_width = 4;
    cfg.trunk_layers = 4;
    cfg.variant = variant;
    FieldParams p = init_field(m, cfg, 31);

    Rng rng(88);
    const Eigen::MatrixXd thetas = random_poses(rng, m, 8);
    Eigen::VectorXd labels(8);
    for (int i = 0; i < 8; ++i) labels[i] = i % 2;
    const Eigen::MatrixXd eik = random_poses(rng, m, 8);
    const double alpha = 0.1;

    // keep every unit away from its LeakyReLU kink so the masks are stable
    REQUIRE(min_preactivation_magnitude(p, thetas) > 1e-4);
    REQUIRE(min_preactivation_magnitude(p, eik) > 1e-4);

    Eigen::VectorXd grad;
    loss_param_gradients(p, thetas, labels, eik, alpha, &grad);

    Eigen::VectorXd v = pack(p);
    const double h = 1e-6;
    for (Eigen::Index i = 0; i < v.size(); ++i) {
      FieldParams pp = p, pm = p;
      Eigen::VectorXd vp = v, vm = v;
      vp[i] += h;
      vm[i] -= h;
      unpack(pp, vp);
      unpack(pm, vm);
      const double lp =
          loss_param_gradients(pp, thetas, labels, eik, alpha, nullptr).total;
      const double lm =
          loss_param_gradients(pm, thetas, labels, eik, alpha, nullptr).total;
      const double fd = (lp - lm) / (2.0 * h);
      CHECK(grad_close(grad[i], fd, 1e-3, 1e-8));
    }
  }
}

TEST_CASE("alpha = 0 takes the pure BCE path") {
  const RobotModel m = chain_model(3);
  const FieldParams p =
      init_field(m, small_config(EncoderVariant::kHierarchical), 5);
  Rng rng(6);
  const Eigen::MatrixXd thetas = random_poses(rng, m, 16);
  Eigen::VectorXd labels(16);
  for (int i = 0; i < 16; ++i) labels[i] = (i * 7) % 2;
  const Eigen::MatrixXd eik_a = random_poses(rng, m, 16);
  const Eigen::MatrixXd eik_b(0, 3);

  Eigen::VectorXd ga, gb;
  const FieldLoss la = loss_param_gradients(p, thetas, labels, eik_a, 0.0, &ga);
  const FieldLoss lb = loss_param_gradients(p, thetas, labels, eik_b, 0.0, &gb);
  CHECK(la.total == lb.total);
  CHECK(la.eikonal == 0.0);
  CHECK(ga == gb);

  CHECK_THROWS(loss_param_gradients(p, thetas, labels, eik_b, 0.1, nullptr));
  CHECK_THROWS(loss_param_gradients(p, thetas, labels, eik_a, -0.1, nullptr));
}

TEST_CASE("a hand-built unit-slope field is stationary") {
  // Flattened net computing g(theta) = theta_0 exactly, with every hidden
  // unit held in the positive LeakyReLU branch. Limits [-2, 2] make the
  // normalization factor 0.5, so all scalings below are exact in binary.
  const RobotModel m = chain_model(2, -2.0, 2.0);
  FieldConfig cfg;
  cfg.feature_dim = 4;
  cfg.encoder_hidden = 4;
  cfg.trunk_width = 4;
  cfg.trunk_layers = 4;
  cfg.variant = EncoderVariant::kFlattened;
  FieldParams p = init_field(m, cfg, 1);
  p.flat.W.setZero();
  p.flat.b.setZero();
  p.flat.W(0, 0) = 1.0;  // z0 = (x0, 0, ...)
  for (int i = 0; i < 4; ++i) {
    p.trunk[i].W.setZero();
    p.trunk[i].b.setZero();
    p.trunk[i].W(0, 0) = 1.0;
  }
  p.trunk[0].b[0] = 16.0;  // keeps the carried unit positive (|x0| <= 1)
  p.trunk[4].W.setZero();
  p.trunk[4].W(0, 0) = 2.0;  // 1 / normalization
  p.trunk[4].b[0] = -32.0;   // cancels the carried bias exactly

  Rng rng(9);
  const Eigen::MatrixXd eik = random_poses(rng, m, 12);
  const FieldBatch fb = forward_field(p, eik);
  for (int i = 0; i < 12; ++i) {
    CHECK(fb.g[i] == doctest::Approx(eik(i, 0)).epsilon(1e-12));
  }
  const Eigen::MatrixXd grads = input_gradients(p, fb);
  for (int i = 0; i < 12; ++i) {
    CHECK(grads(i, 0) == 1.0);
    CHECK(grads(i, 1) == 0.0);
  }

  // Soft labels equal to the classifier output: the BCE gradient is
  // exactly zero, and the Eikonal term and its gradient are exactly zero.
  const Eigen::MatrixXd thetas = random_poses(rng, m, 6);
  const FieldBatch fb2 = forward_field(p, thetas);
  Eigen::VectorXd labels(6);
  for (int i = 0; i < 6; ++i) labels[i] = sigmoid(p.scale() * fb2.g[i]);
  Eigen::VectorXd grad;
  const FieldLoss loss = loss_param_gradients(p, thetas, labels, eik, 0.1, &grad);
  CHECK(loss.eikonal == 0.0);
  CHECK(grad.cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("scale separation: rho changes f only") {
  const RobotModel m = chain_model(3);
  FieldParams p = init_field(m, small_config(EncoderVariant::kHierarchical), 3);
  Rng rng(4);
  const Eigen::MatrixXd theta = random_poses(rng, m, 1);
  const Pose pose = theta.row(0).transpose();
  const FieldEval a = evaluate_field(p, m, pose);
  p.rho = -2.5;
  const FieldEval b = evaluate_field(p, m, pose);
  CHECK(a.g == b.g);
  CHECK(a.grad_theta == b.grad_theta);
  CHECK(a.f != b.f);
}

TEST_CASE("s -> 0 and a zeroed head both give f = 0.5") {
  const RobotModel m = chain_model(3);
  FieldParams p = init_field(m, small_config(EncoderVariant::kHierarchical), 3);
  p.rho = -60.0;  // s below any representable effect on the sigmoid
  Rng rng(14);
  for (int i = 0; i < 10; ++i) {
    const Pose pose = random_poses(rng, m, 1).row(0).transpose();
    CHECK(evaluate_field(p, m, pose).f == 0.5);
  }

  FieldParams q = init_field(m, small_config(EncoderVariant::kHierarchical), 3);
  q.trunk.back().W.setZero();
  q.trunk.back().b.setZero();
  const Pose pose = random_poses(rng, m, 1).row(0).transpose();
  const FieldEval e = evaluate_field(q, m, pose);
  CHECK(e.g == 0.0);
  CHECK(e.f == 0.5);
  CHECK(e.grad_theta.cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("f is strictly monotone in g for fixed s") {
  Rng rng(21);
  for (int i = 0; i < 100; ++i) {
    const double s = std::exp(rng.uniform(-2.0, 3.0));
    // keep s*g inside the range where the sigmoid is resolvable in doubles
    double g1 = rng.uniform(-30.0 / s, 30.0 / s);
    double g2 = rng.uniform(-30.0 / s, 30.0 / s);
    if (g1 == g2) continue;
    if (g1 > g2) std::swap(g1, g2);
    CHECK(sigmoid(s * g1) < sigmoid(s * g2));
  }
}

TEST_CASE("hierarchy locality: only the read joint and its ancestors matter") {
  const RobotModel m = tree_model();  // 0 <- 1 <- 2, 0 <- 3 <- 4
  FieldParams p = init_field(m, small_config(EncoderVariant::kHierarchical), 8);
  const int ell = p.config.feature_dim;
  // Keep only the trunk columns reading joint 2's features.
  Eigen::MatrixXd w0 = Eigen::MatrixXd::Zero(p.trunk[0].W.rows(),
                                             p.trunk[0].W.cols());
  w0.middleCols(2 * ell, ell) = p.trunk[0].W.middleCols(2 * ell, ell);
  p.trunk[0].W = w0;

  Rng rng(77);
  const Pose base = random_poses(rng, m, 1).row(0).transpose();
  const double g0 = evaluate_field(p, m, base).g;
  for (int j : {3, 4}) {  // neither joint 2 nor its ancestors
    Pose bumped = base;
    bumped[j] = rng.uniform(m.joints[j].lo, m.joints[j].hi);
    CHECK(evaluate_field(p, m, bumped).g == g0);
  }
  for (int j : {0, 1, 2}) {  // the read joint and its ancestors
    Pose bumped = base;
    bumped[j] += 0.2;
    CHECK(evaluate_field(p, m, bumped).g != g0);
  }
}

TEST_CASE("checkpoint round trip is bit exact and refuses mismatched robots") {
  const RobotModel m = tree_model();
  const FieldParams p =
      init_field(m, small_config(EncoderVariant::kHierarchical), 123, "tree");
  const std::string text = checkpoint_to_json(p);
  const FieldParams q = checkpoint_from_json(text);
  CHECK(pack(p) == pack(q));
  CHECK(q.scene_id == "tree");
  CHECK(q.seed == 123);
  CHECK(checkpoint_to_json(q) == text);

  const RobotModel other = chain_model(3);
  CHECK_THROWS(check_model_compatible(q, other));

  RobotModel shifted = m;
  shifted.joints[1].lo -= 0.5;
  CHECK_THROWS(check_model_compatible(q, shifted));

  // same K but a different tree
  RobotModel retree = m;
  retree.joints[4].parent = 0;
  CHECK_THROWS(check_model_compatible(q, retree));
}

TEST_CASE("non-finite intermediates are reported with the layer") {
  const RobotModel m = chain_model(3);
  FieldParams p = init_field(m, small_config(EncoderVariant::kHierarchical), 3);
  p.trunk[2].W(0, 0) = std::numeric_limits<double>::infinity();
  const Pose pose = Pose::Zero(3);
  CHECK_THROWS_WITH_AS(evaluate_field(p, m, pose),
                       doctest::Contains("trunk layer 3"), std::runtime_error);
}

TEST_CASE("evaluate_field validates the pose") {
  const RobotModel m = chain_model(3);
  const FieldParams p =
      init_field(m, small_config(EncoderVariant::kHierarchical), 3);
  Pose out_of_limits(3);
  out_of_limits << 5.0, 0.0, 0.0;
  CHECK_THROWS(evaluate_field(p, m, out_of_limits));
}
