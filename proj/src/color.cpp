#include "pcqa/color.hpp"

#include <string>
#include <vector>

#include "pcqa/error.hpp"
#include "pcqa/simd/kernels.hpp"

namespace pcqa::color {

namespace {

constexpr simd::Mat3 kGcm{{{0.06, 0.63, 0.27}, {0.30, 0.04, -0.35}, {0.34, -0.6, 0.17}}};

// BT.709: Y = 0.2126 R + 0.7152 G + 0.0722 B, U = (B - Y) / 1.8556,
// V = (R - Y) / 1.5748, chroma offset by 0.5 afterwards.
constexpr double kKr = 0.2126;
constexpr double kKb = 0.0722;
constexpr double kKg = 1.0 - kKr - kKb;
constexpr double kCb = 2.0 * (1.0 - kKb);
constexpr double kCr = 2.0 * (1.0 - kKr);
constexpr simd::Mat3 kYuv{{{kKr, kKg, kKb},
                           {-kKr / kCb, -kKg / kCb, (1.0 - kKb) / kCb},
                           {(1.0 - kKr) / kCr, -kKg / kCr, -kKb / kCr}}};

Vec3 apply(const simd::Mat3& m, const Vec3& v) {
  Vec3 out;
  for (int r = 0; r < 3; ++r) out[r] = m.m[r][0] * v[0] + m.m[r][1] * v[1] + m.m[r][2] * v[2];
  return out;
}

}  // namespace

std::string_view space_name(Space space) {
  switch (space) {
    case Space::Gcm:
      return "gcm";
    case Space::Yuv:
      return "yuv";
    case Space::Rgb:
      return "rgb";
  }
  return "unknown";
}

Space parse_space(std::string_view name) {
  if (name == "gcm") return Space::Gcm;
  if (name == "yuv") return Space::Yuv;
  if (name == "rgb") return Space::Rgb;
  throw std::invalid_argument("unknown color space '" + std::string(name) + "'");
}

ColorSpaceConfig ColorSpaceConfig::defaults(Space space) {
  if (space == Space::Rgb) return {space, {1.0, 2.0, 1.0}};
  return {space, {6.0, 1.0, 1.0}};
}

Vec3 to_gcm(const Vec3& rgb) { return apply(kGcm, rgb); }

Vec3 to_yuv(const Vec3& rgb) {
  Vec3 yuv = apply(kYuv, rgb);
  yuv[1] += 0.5;
  yuv[2] += 0.5;
  return yuv;
}

graph::SignalAttribute decompose(const PointCloud& cloud, const ColorSpaceConfig& config) {
  if (!cloud.has_colors()) {
    throw DomainError("color signal requested for a cloud without colors; use the coord or normal signal");
  }
  const std::size_t n = cloud.size();
  std::vector<double> r(n), g(n), b(n);
  for (std::size_t i = 0; i < n; ++i) {
    const Rgb& c = cloud.color(i);
    r[i] = c[0] / 255.0;
    g[i] = c[1] / 255.0;
    b[i] = c[2] / 255.0;
  }
  std::vector<double> c0 = r, c1 = g, c2 = b;
  if (config.space != Space::Rgb) {
    simd::transform3(config.space == Space::Gcm ? kGcm : kYuv, r, g, b, c0, c1, c2);
    if (config.space == Space::Yuv) {
      for (std::size_t i = 0; i < n; ++i) {
        c1[i] += 0.5;
        c2[i] += 0.5;
      }
    }
  }
  std::vector<double> values(3 * n);
  for (std::size_t i = 0; i < n; ++i) {
    values[3 * i] = c0[i];
    values[3 * i + 1] = c1[i];
    values[3 * i + 2] = c2[i];
  }
  return graph::SignalAttribute(graph::SignalKind::Color, 3, std::move(values));
}

}  // namespace pcqa::color
