#pragma once

// Point cloud files.
//
// CSV: one point per row, ambient_dim columns, '.' decimal separator,
// shortest round-trip decimal representation. An optional header row
// "x1,x2,..." is written on request and skipped on read when present.
//
// Binary (.pcld): 16-byte little-endian header
//   bytes 0-3   magic "PCLD"
//   bytes 4-7   u32 ambient_dim
//   bytes 8-11  u32 count
//   bytes 12-15 u32 reserved, zero
// followed by count * ambient_dim little-endian IEEE-754 doubles, row-major.

#include <filesystem>
#include <span>
#include <string>
#include <vector>

#include "avc/randgeom.hpp"

namespace avc {

void write_cloud_csv(const PointCloud& cloud, const std::filesystem::path& path,
                     bool header = false);
/// Reads a CSV cloud. intrinsic_dim defaults to ambient_dim - 1.
PointCloud read_cloud_csv(const std::filesystem::path& path, int intrinsic_dim = 0,
                          double radius = 1.0);

void write_cloud_binary(const PointCloud& cloud, const std::filesystem::path& path);
PointCloud read_cloud_binary(const std::filesystem::path& path, int intrinsic_dim = 0,
                             double radius = 1.0);

/// Dispatches on extension: ".pcld" is binary, anything else CSV.
PointCloud read_cloud(const std::filesystem::path& path, int intrinsic_dim = 0,
                      double radius = 1.0);
void write_cloud(const PointCloud& cloud, const std::filesystem::path& path,
                 bool header = false);

/// Shortest decimal string that parses back to exactly `x`.
std::string format_double(double x);

/// Writes rows of named columns as CSV (no quoting; names must be plain).
void write_columns_csv(const std::filesystem::path& path,
                       std::span<const std::string> names,
                       std::span<const std::vector<double>> columns);

}  // namespace avc
