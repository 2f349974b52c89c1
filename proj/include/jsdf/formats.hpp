#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include <Eigen/Dense>

namespace jsdf {

/// Shortest decimal representation that round-trips to the same 64-bit float.
std::string fmt_double(double x);

/// One CSV line from already-formatted cells.
std::string csv_row(const std::vector<std::string>& cells);

/// FNV-1a 64-bit over a byte buffer, hex-encoded.
std::string fnv1a_hex(const std::string& bytes);

/// FNV-1a 64-bit over a file's contents.
std::string hash_file(const std::string& path);

std::string read_file(const std::string& path);
void write_file(const std::string& path, const std::string& contents);

}  // namespace jsdf
