#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include "pcqa/point_cloud.hpp"

namespace pcqa::distortion {

/// Impairment families. Octree is a voxel-quantization stand-in for octree
/// compression, not a codec.
enum class Kind { ColorNoise, GeometryNoise, Downsample, Octree };

std::string_view kind_name(Kind kind);
Kind parse_kind(std::string_view name);

/// One impairment. `level` means, per kind:
///   ColorNoise    - Gaussian sigma as a fraction of 255, in [0, 1]
///   GeometryNoise - Gaussian sigma per axis as a fraction of B (min extent), >= 0
///   Downsample    - fraction of points kept, in (0, 1]
///   Octree        - grid depth, an integer in [1, 24]
struct Step {
  Kind kind = Kind::GeometryNoise;
  double level = 0.0;
};

struct DistortionSpec {
  std::vector<Step> steps;  // applied in order
  std::uint64_t seed = 0;
};

inline constexpr int kPresetLevels = 6;

/// Level `index` (1 = mildest .. 6 = strongest) of the named presets.
double preset_level(Kind kind, int index);

/// Throws DomainError for out-of-range levels, colorless clouds under
/// ColorNoise, or a downsample that keeps no point.
PointCloud apply(const PointCloud& cloud, const DistortionSpec& spec);

/// Parses "cn", "ds+cn", ... into steps; `levels` must match in count.
std::vector<Step> parse_steps(std::string_view kinds, const std::vector<double>& levels);

}  // namespace pcqa::distortion
