#include "jsdf/scene_io.hpp"

#include <filesystem>
#include <stdexcept>

#include <json.hpp>

#include "jsdf/formats.hpp"

namespace jsdf {

namespace {

using nlohmann::json;

Eigen::Vector3d vec3(const json& arr, const std::string& where) {
  if (!arr.is_array() || arr.size() != 3) {
    throw std::runtime_error(where + ": expected an array of 3 numbers");
  }
  return {arr[0].get<double>(), arr[1].get<double>(), arr[2].get<double>()};
}

Transform origin_from_json(const json& j, const std::string& where) {
  const Eigen::Vector3d xyz =
      j.contains("xyz") ? vec3(j.at("xyz"), where + ".xyz")
                        : Eigen::Vector3d::Zero();
  if (j.contains("quat")) {
    const json& q = j.at("quat");
    if (!q.is_array() || q.size() != 4) {
      throw std::runtime_error(where + ".quat: expected [w, x, y, z]");
    }
    return from_quat(q[0].get<double>(), q[1].get<double>(),
                     q[2].get<double>(), q[3].get<double>(), xyz);
  }
  const Eigen::Vector3d rpy =
      j.contains("rpy") ? vec3(j.at("rpy"), where + ".rpy")
                        : Eigen::Vector3d::Zero();
  return from_rpy(rpy, xyz);
}

Capsule capsule_from_json(const json& j, const std::string& where) {
  Capsule c;
  c.p0 = vec3(j.at("p0"), where + ".p0");
  c.p1 = vec3(j.at("p1"), where + ".p1");
  c.radius = j.at("radius").get<double>();
  return c;
}

Obstacle obstacle_from_json(const json& j, const std::string& where) {
  const std::string type = j.at("type").get<std::string>();
  if (type == "sphere") {
    return Sphere{vec3(j.at("center"), where + ".center"),
                  j.at("radius").get<double>()};
  }
  if (type == "capsule") {
    return capsule_from_json(j, where);
  }
  if (type == "halfspace") {
    return HalfSpace{vec3(j.at("normal"), where + ".normal"),
                     j.at("offset").get<double>()};
  }
  throw std::runtime_error(where + ": unknown obstacle type '" + type + "'");
}

}  // namespace

Scene scene_from_json(const std::string& text, const std::string& default_id) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::exception& e) {
    throw std::runtime_error(std::string("scene parse error: ") + e.what());
  }
  try {
    if (j.at("version").get<int>() != 1) {
      throw std::runtime_error("unsupported scene version");
    }
    RobotModel robot;
    const json& jd = j.at("robot");
    int idx = 0;
    for (const json& joint_json : jd.at("joints")) {
      const std::string where = "robot.joints[" + std::to_string(idx) + "]";
      Joint joint;
      joint.parent = joint_json.at("parent").get<int>();
      joint.origin = origin_from_json(joint_json.at("origin"), where);
      joint.axis = vec3(joint_json.at("axis"), where + ".axis");
      const json& limits = joint_json.at("limits");
      if (!limits.is_array() || limits.size() != 2) {
        throw std::runtime_error(where + ".limits: expected [lo, hi]");
      }
      joint.lo = limits[0].get<double>();
      joint.hi = limits[1].get<double>();
      robot.joints.push_back(joint);
      ++idx;
    }
    idx = 0;
    for (const json& link_json : jd.at("links")) {
      const std::string where = "robot.links[" + std::to_string(idx) + "]";
      std::vector<Capsule> capsules;
      for (const json& cj : link_json.at("capsules")) {
        capsules.push_back(capsule_from_json(cj, where + ".capsules"));
      }
      robot.link_capsules.push_back(std::move(capsules));
      ++idx;
    }

    std::vector<Obstacle> obstacles;
    idx = 0;
    if (j.contains("obstacles")) {
      for (const json& oj : j.at("obstacles")) {
        obstacles.push_back(
            obstacle_from_json(oj, "obstacles[" + std::to_string(idx) + "]"));
        ++idx;
      }
    }

    std::vector<std::pair<int, int>> exclude;
    if (j.contains("self_collision") &&
        j.at("self_collision").contains("exclude_pairs")) {
      for (const json& pj : j.at("self_collision").at("exclude_pairs")) {
        if (!pj.is_array() || pj.size() != 2) {
          throw std::runtime_error(
              "self_collision.exclude_pairs: expected [i, j] pairs");
        }
        exclude.emplace_back(pj[0].get<int>(), pj[1].get<int>());
      }
    }
    const double clearance =
        j.contains("clearance") ? j.at("clearance").get<double>() : 0.0;
    const std::string id =
        j.contains("id") ? j.at("id").get<std::string>() : default_id;
    return make_scene(std::move(robot), std::move(obstacles), exclude,
                      clearance, id);
  } catch (const json::exception& e) {
    throw std::runtime_error(std::string("scene schema error: ") + e.what());
  }
}

Scene load_scene(const std::string& path) {
  const std::string stem = std::filesystem::path(path).stem().string();
  return scene_from_json(read_file(path), stem);
}

}  // namespace jsdf
