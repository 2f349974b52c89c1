#include "jsdf/dataset.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include <json.hpp>

#include "jsdf/formats.hpp"
#include "jsdf/rng.hpp"

namespace jsdf {

Dataset generate_dataset(const Scene& scene, int n, double balance_tol,
                         std::uint64_t seed, int budget_factor) {
  if (n < 2) {
    throw std::invalid_argument("dataset size must be at least 2");
  }
  if (balance_tol < 0.0) {
    throw std::invalid_argument("balance tolerance must be >= 0");
  }
  const int target_collided = n / 2;
  const int target_free = n - target_collided;
  if (std::abs(target_free - target_collided) > balance_tol * n) {
    throw std::invalid_argument(
        "balance tolerance unsatisfiable for odd n; use an even n");
  }

  const Eigen::VectorXd lo = scene.robot.limits_lo();
  const Eigen::VectorXd hi = scene.robot.limits_hi();
  Rng rng(seed);

  Dataset ds;
  ds.scene_id = scene.id;
  ds.seed = seed;
  ds.joint_count = scene.robot.joint_count();
  ds.samples.reserve(n);

  const long budget = static_cast<long>(budget_factor) * n;
  int free_count = 0, collided_count = 0;
  long draws = 0;
  while (free_count < target_free || collided_count < target_collided) {
    if (draws >= budget) {
      if (free_count == 0 || collided_count == 0) {
        throw std::runtime_error(
            "degenerate scene: one collision class is empty after " +
            std::to_string(draws) + " draws");
      }
      throw std::runtime_error(
          "draw budget exhausted before the dataset balanced");
    }
    ++draws;
    const Pose theta = rng.uniform_vector(lo, hi);
    const CollisionReport report = detect_collisions(scene, theta);
    int& count = report.collided ? collided_count : free_count;
    const int target = report.collided ? target_collided : target_free;
    if (count < target) {
      ds.samples.push_back(
          {theta, report.collided ? 1 : 0, report.pair_count, std::nullopt});
      ++count;
    }
  }
  return ds;
}

Dataset ndf_distance_labels(const Dataset& dataset, int k) {
  if (k < 1) {
    throw std::invalid_argument("k must be >= 1");
  }
  const auto [free, collided] = dataset.class_counts();
  if (free == 0 || collided == 0) {
    throw std::invalid_argument(
        "ndf labels need both classes present in the dataset");
  }
  const std::size_t n = dataset.samples.size();
  Dataset out = dataset;
  std::vector<double> dists;
  for (std::size_t i = 0; i < n; ++i) {
    const LabeledPose& si = dataset.samples[i];
    dists.clear();
    for (std::size_t j = 0; j < n; ++j) {
      const LabeledPose& sj = dataset.samples[j];
      if (sj.label == si.label) continue;
      dists.push_back((si.theta - sj.theta).norm());
    }
    const int kk = std::min<int>(k, static_cast<int>(dists.size()));
    std::partial_sort(dists.begin(), dists.begin() + kk, dists.end());
    double mean = 0.0;
    for (int m = 0; m < kk; ++m) mean += dists[m];
    mean /= kk;
    out.samples[i].ndf = si.label ? mean : -mean;
  }
  return out;
}

namespace {

nlohmann::json pose_to_json(const Pose& p) {
  nlohmann::json arr = nlohmann::json::array();
  for (Eigen::Index i = 0; i < p.size(); ++i) arr.push_back(p[i]);
  return arr;
}

Pose pose_from_json(const nlohmann::json& arr) {
  Pose p(arr.size());
  for (std::size_t i = 0; i < arr.size(); ++i) p[i] = arr[i].get<double>();
  return p;
}

}  // namespace

std::string dataset_to_jsonl(const Dataset& dataset) {
  std::string out;
  nlohmann::json header;
  header["k"] = dataset.joint_count;
  header["scene_id"] = dataset.scene_id;
  header["seed"] = dataset.seed;
  header["version"] = 1;
  out += header.dump();
  out += '\n';
  for (const LabeledPose& s : dataset.samples) {
    nlohmann::json rec;
    rec["c"] = s.label;
    rec["ndf"] = s.ndf ? nlohmann::json(*s.ndf) : nlohmann::json(nullptr);
    rec["pairs"] = s.pair_count;
    rec["theta"] = pose_to_json(s.theta);
    out += rec.dump();
    out += '\n';
  }
  return out;
}

Dataset dataset_from_jsonl(const std::string& text) {
  Dataset ds;
  std::size_t pos = 0;
  bool header_seen = false;
  int line_no = 0;
  while (pos < text.size()) {
    std::size_t end = text.find('\n', pos);
    if (end == std::string::npos) end = text.size();
    const std::string line = text.substr(pos, end - pos);
    pos = end + 1;
    ++line_no;
    if (line.empty()) continue;
    nlohmann::json j;
    try {
      j = nlohmann::json::parse(line);
    } catch (const nlohmann::json::exception& e) {
      throw std::runtime_error("dataset line " + std::to_string(line_no) +
                               ": " + e.what());
    }
    if (!header_seen) {
      if (!j.contains("version") || j["version"].get<int>() != 1) {
        throw std::runtime_error("dataset header missing or wrong version");
      }
      ds.joint_count = j.at("k").get<int>();
      ds.scene_id = j.at("scene_id").get<std::string>();
      ds.seed = j.at("seed").get<std::uint64_t>();
      header_seen = true;
      continue;
    }
    LabeledPose s;
    s.label = j.at("c").get<int>();
    s.pair_count = j.at("pairs").get<int>();
    s.theta = pose_from_json(j.at("theta"));
    if (s.theta.size() != ds.joint_count) {
      throw std::runtime_error("dataset line " + std::to_string(line_no) +
                               ": pose length does not match header k");
    }
    if (!j.at("ndf").is_null()) {
      s.ndf = j.at("ndf").get<double>();
    }
    ds.samples.push_back(std::move(s));
  }
  if (!header_seen) {
    throw std::runtime_error("dataset file has no header line");
  }
  return ds;
}

void save_dataset(const Dataset& dataset, const std::string& path) {
  write_file(path, dataset_to_jsonl(dataset));
}

Dataset load_dataset(const std::string& path) {
  return dataset_from_jsonl(read_file(path));
}

}  // namespace jsdf
