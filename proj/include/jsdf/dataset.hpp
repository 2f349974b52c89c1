#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "jsdf/collision.hpp"

namespace jsdf {

struct LabeledPose {
  Pose theta;
  int label = 0;       // 1 = collision
  int pair_count = 0;  // penetrating primitive pairs at theta
  std::optional<double> ndf;  // signed joint-space distance label, radians
};

struct Dataset {
  std::vector<LabeledPose> samples;
  std::string scene_id;
  std::uint64_t seed = 0;
  int joint_count = 0;

  std::pair<int, int> class_counts() const {  // (free, collided)
    int free = 0, collided = 0;
    for (const LabeledPose& s : samples) (s.label ? collided : free)++;
    return {free, collided};
  }
};

/// Uniform per-joint sampling with oracle labels, balanced by drawing until
/// both class quotas are met (draws of a full class are discarded).
/// Deterministic from `seed`. Throws "degenerate scene" if a class is empty
/// after budget_factor*n draws.
Dataset generate_dataset(const Scene& scene, int n, double balance_tol,
                         std::uint64_t seed, int budget_factor = 100);

/// Fills ndf with the signed L2 joint-space distance to the nearest
/// opposite-class sample (mean of k nearest; k = 1 by default). Positive for
/// collided samples, negative for free ones.
Dataset ndf_distance_labels(const Dataset& dataset, int k = 1);

/// JSON-lines: header {"k":..,"scene_id":..,"seed":..,"version":1} then one
/// record per sample {"c":..,"ndf":..,"pairs":..,"theta":[..]}.
std::string dataset_to_jsonl(const Dataset& dataset);
Dataset dataset_from_jsonl(const std::string& text);
void save_dataset(const Dataset& dataset, const std::string& path);
Dataset load_dataset(const std::string& path);

}  // namespace jsdf
