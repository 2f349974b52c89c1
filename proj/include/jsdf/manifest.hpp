#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

namespace jsdf {

/// Record of one artifact-producing command: the full flag snapshot, seed,
/// input hashes, and output paths. Written next to the primary output as
/// <output>.manifest.json.
struct RunManifest {
  std::string command;
  std::map<std::string, std::string> config;
  std::uint64_t seed = 0;
  bool has_seed = false;
  std::vector<std::string> inputs;   // hashed on write
  std::vector<std::string> outputs;
};

std::string manifest_to_json(const RunManifest& m);
void write_manifest(const RunManifest& m, const std::string& primary_output);

}  // namespace jsdf
