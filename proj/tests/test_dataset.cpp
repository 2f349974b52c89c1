#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "jsdf/dataset.hpp"
#include "jsdf/rng.hpp"
#include "jsdf/scene_io.hpp"

using namespace jsdf;

namespace {

Scene planar4() {
  return load_scene(std::string(JSDF_SCENES_DIR) + "/planar4.json");
}

}  // namespace

TEST_CASE("generated datasets are balanced and oracle-consistent") {
  const Scene scene = planar4();
  const Dataset ds = generate_dataset(scene, 1000, 0.05, 7);
  REQUIRE(ds.samples.size() == 1000);
  const auto [free, collided] = ds.class_counts();
  CHECK(std::abs(free - collided) <= 50);
  CHECK(ds.scene_id == "planar4");
  CHECK(ds.seed == 7);

  // second oracle pass reproduces every label and pair count
  for (const LabeledPose& s : ds.samples) {
    const CollisionReport r = detect_collisions(scene, s.theta);
    CHECK(s.label == (r.collided ? 1 : 0));
    CHECK(s.pair_count == r.pair_count);
    CHECK((s.label == 1) == (s.pair_count >= 1));
  }
}

TEST_CASE("same seed gives bit-identical datasets") {
  const Scene scene = planar4();
  const Dataset a = generate_dataset(scene, 400, 0.05, 99);
  const Dataset b = generate_dataset(scene, 400, 0.05, 99);
  CHECK(dataset_to_jsonl(a) == dataset_to_jsonl(b));
  const Dataset c = generate_dataset(scene, 400, 0.05, 100);
  CHECK(dataset_to_jsonl(a) != dataset_to_jsonl(c));
}

TEST_CASE("a single-class scene is rejected as degenerate") {
  // Two-link arm floating in empty space: no obstacles, and the only
  // default self pair (0, 2) has no base capsules to hit.
  RobotModel m;
  for (int k = 0; k < 2; ++k) {
    Joint j;
    j.parent = k - 1;
    j.origin = k == 0 ? Transform::identity()
                      : translation(Eigen::Vector3d(0.4, 0, 0));
    j.axis = Eigen::Vector3d::UnitZ();
    j.lo = -1.0;
    j.hi = 1.0;
    m.joints.push_back(j);
  }
  m.link_capsules.resize(3);
  m.link_capsules[1].push_back(
      Capsule{Eigen::Vector3d::Zero(), Eigen::Vector3d(0.4, 0, 0), 0.03});
  m.link_capsules[2].push_back(
      Capsule{Eigen::Vector3d::Zero(), Eigen::Vector3d(0.3, 0, 0), 0.03});
  const Scene empty = make_scene(m, {}, {}, 0.0, "empty");
  CHECK_THROWS_WITH_AS(generate_dataset(empty, 100, 0.05, 1, 5),
                       doctest::Contains("degenerate"), std::runtime_error);
}

TEST_CASE("ndf labels: two-point set and signs") {
  Dataset ds;
  ds.joint_count = 2;
  LabeledPose a, b;
  a.theta = Eigen::Vector2d(0.0, 0.0);
  a.label = 0;
  a.pair_count = 0;
  b.theta = Eigen::Vector2d(1.0, 0.0);
  b.label = 1;
  b.pair_count = 2;
  ds.samples = {a, b};
  const Dataset out = ndf_distance_labels(ds, 1);
  CHECK(*out.samples[0].ndf == -1.0);
  CHECK(*out.samples[1].ndf == 1.0);
}

TEST_CASE("ndf labels match an exhaustive scan") {
  const Scene scene = planar4();
  const Dataset ds = generate_dataset(scene, 300, 0.05, 13);
  const Dataset labeled = ndf_distance_labels(ds, 1);
  for (std::size_t i = 0; i < ds.samples.size(); ++i) {
    double best = std::numeric_limits<double>::infinity();
    for (std::size_t j = 0; j < ds.samples.size(); ++j) {
      if (ds.samples[j].label == ds.samples[i].label) continue;
      best = std::min(best,
                      std::sqrt((ds.samples[i].theta - ds.samples[j].theta)
                                    .squaredNorm()));
    }
    const double got = *labeled.samples[i].ndf;
    CHECK(std::abs(got) == best);
    CHECK((got > 0.0) == (ds.samples[i].label == 1));
  }
}

TEST_CASE("duplicate pose with both labels gets distance zero") {
  Dataset ds;
  ds.joint_count = 1;
  LabeledPose a, b, c;
  a.theta = Eigen::VectorXd::Constant(1, 0.5);
  a.label = 0;
  b.theta = Eigen::VectorXd::Constant(1, 0.5);
  b.label = 1;
  b.pair_count = 1;
  c.theta = Eigen::VectorXd::Constant(1, -0.5);
  c.label = 0;
  ds.samples = {a, b, c};
  const Dataset out = ndf_distance_labels(ds, 1);
  CHECK(*out.samples[0].ndf == 0.0);
  CHECK(*out.samples[1].ndf == 0.0);
}

TEST_CASE("ndf labels require both classes") {
  Dataset ds;
  ds.joint_count = 1;
  LabeledPose a;
  a.theta = Eigen::VectorXd::Constant(1, 0.5);
  a.label = 0;
  ds.samples = {a, a};
  CHECK_THROWS(ndf_distance_labels(ds, 1));
}

TEST_CASE("jsonl round trip is byte exact") {
  const Scene scene = planar4();
  Dataset ds = generate_dataset(scene, 200, 0.05, 4242);
  ds = ndf_distance_labels(ds, 1);
  const std::string text = dataset_to_jsonl(ds);
  const Dataset back = dataset_from_jsonl(text);
  CHECK(dataset_to_jsonl(back) == text);
  CHECK(back.samples.size() == ds.samples.size());
  CHECK(back.seed == ds.seed);

  // ndf-free datasets round trip the null field too
  const Dataset plain = generate_dataset(scene, 50, 0.05, 1);
  const std::string plain_text = dataset_to_jsonl(plain);
  CHECK(dataset_to_jsonl(dataset_from_jsonl(plain_text)) == plain_text);
}

TEST_CASE("uniform pose stream matches the limit midpoints") {
  const Scene scene = planar4();
  const Eigen::VectorXd lo = scene.robot.limits_lo();
  const Eigen::VectorXd hi = scene.robot.limits_hi();
  Rng rng(202);
  const int n = 20000;
  Eigen::VectorXd mean = Eigen::VectorXd::Zero(lo.size());
  for (int i = 0; i < n; ++i) mean += rng.uniform_vector(lo, hi);
  mean /= n;
  for (Eigen::Index k = 0; k < lo.size(); ++k) {
    const double mid = 0.5 * (lo[k] + hi[k]);
    const double se = (hi[k] - lo[k]) / std::sqrt(12.0) / std::sqrt(n);
    CHECK(std::abs(mean[k] - mid) < 3.0 * se);
  }
}

TEST_CASE("dataset rejects bad arguments") {
  const Scene scene = planar4();
  CHECK_THROWS(generate_dataset(scene, 1, 0.05, 1));
  CHECK_THROWS(generate_dataset(scene, 100, -0.1, 1));
}
