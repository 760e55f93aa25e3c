#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "pcqa/point_cloud.hpp"

namespace pcqa::io {

enum class PlyFormat { Ascii, BinaryLittleEndian };

struct PlyLoadResult {
  PointCloud cloud;
  std::vector<std::string> warnings;
};

/// Reads the vertex element of an ASCII or binary little-endian PLY file.
///
/// x/y/z are required; red/green/blue (or r/g/b) and nx/ny/nz are picked up
/// when all three of a group are present. Any other vertex property, and any
/// element declared after "vertex", is skipped.
PlyLoadResult load_ply_with_warnings(const std::filesystem::path& path);
PointCloud load_ply(const std::filesystem::path& path);

void save_ply(const PointCloud& cloud, const std::filesystem::path& path, PlyFormat format);

struct MosRow {
  std::string content;
  std::string distortion;
  double mos = 0.0;
};

using MosTable = std::vector<MosRow>;

/// CSV with a header naming at least `content`, `distortion` and `mos`.
MosTable load_mos_csv(const std::filesystem::path& path);

}  // namespace pcqa::io
