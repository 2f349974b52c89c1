#include "jsdf/manifest.hpp"

#include <chrono>
#include <ctime>

#include <json.hpp>

#include "jsdf/formats.hpp"

namespace jsdf {

namespace {

std::string iso_now() {
  const std::time_t t =
      std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  char buf[32];
  std::tm tm_utc{};
  gmtime_r(&t, &tm_utc);
  std::strftime(buf, sizeof(buf), "%Y-%m-%dT%H:%M:%SZ", &tm_utc);
  return buf;
}

}  // namespace

std::string manifest_to_json(const RunManifest& m) {
  nlohmann::json j;
  j["version"] = 1;
  j["command"] = m.command;
  j["config"] = m.config;
  if (m.has_seed) j["seed"] = m.seed;
  nlohmann::json inputs;
  for (const std::string& path : m.inputs) {
    inputs[path] = "fnv1a64:" + hash_file(path);
  }
  j["inputs"] = inputs;
  j["outputs"] = m.outputs;
  j["created"] = iso_now();
  return j.dump(2) + "\n";
}

void write_manifest(const RunManifest& m, const std::string& primary_output) {
  write_file(primary_output + ".manifest.json", manifest_to_json(m));
}

}  // namespace jsdf
