#pragma once

#include <array>
#include <string_view>

#include "pcqa/graph.hpp"
#include "pcqa/point_cloud.hpp"

namespace pcqa::color {

enum class Space { Gcm, Yuv, Rgb };

std::string_view space_name(Space space);
Space parse_space(std::string_view name);

struct ColorSpaceConfig {
  Space space = Space::Gcm;
  std::array<double, 3> weights{6.0, 1.0, 1.0};

  /// Channel weights: 6:1:1 for GCM and YUV, 1:2:1 for RGB.
  static ColorSpaceConfig defaults(Space space);
};

/// Gaussian color model: luminance plus two chrominance channels.
/// Input RGB in [0,1].
Vec3 to_gcm(const Vec3& rgb);

/// BT.709 full range: Y in [0,1], U and V centered at 0.5. Input RGB in [0,1].
Vec3 to_yuv(const Vec3& rgb);

/// 8-bit color rescaled to [0,1].
inline Vec3 normalized(const Rgb& c) {
  return Vec3(c[0] / 255.0, c[1] / 255.0, c[2] / 255.0);
}

/// Three-channel signal of the cloud's colors in the configured space.
/// Throws DomainError when the cloud has no colors.
graph::SignalAttribute decompose(const PointCloud& cloud, const ColorSpaceConfig& config);

}  // namespace pcqa::color
