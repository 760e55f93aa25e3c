#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <numbers>
#include <random>
#include <vector>

#include "pcqa/point_cloud.hpp"

namespace pcqa::testing {

/// Uniform random points in [0,1]^3 with random colors.
inline PointCloud random_cloud(std::size_t n, std::uint64_t seed, bool colors = true) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  std::uniform_int_distribution<int> c(0, 255);
  std::vector<Vec3> pos(n);
  std::vector<Rgb> col(n);
  for (std::size_t i = 0; i < n; ++i) {
    pos[i] = Vec3(u(rng), u(rng), u(rng));
    col[i] = {static_cast<std::uint8_t>(c(rng)), static_cast<std::uint8_t>(c(rng)),
              static_cast<std::uint8_t>(c(rng))};
  }
  if (!colors) return PointCloud(std::move(pos));
  return PointCloud(std::move(pos), std::move(col));
}

/// Bumpy closed surface (a perturbed sphere of radius ~1) carrying a smooth
/// color pattern with a few sharp stripes, roughly like a scanned object.
inline PointCloud textured_object(std::size_t n, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> g(0.0, 1.0);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  const double fa = 2.0 + 3.0 * u(rng);
  const double fb = 2.0 + 3.0 * u(rng);
  const double phase = 2.0 * std::numbers::pi * u(rng);
  std::vector<Vec3> pos(n);
  std::vector<Rgb> col(n);
  for (std::size_t i = 0; i < n; ++i) {
    Vec3 d(g(rng), g(rng), g(rng));
    d.normalize();
    const double r = 1.0 + 0.08 * std::sin(fa * d.x() + phase) * std::cos(fb * d.y());
    pos[i] = r * d;
    const double s = std::sin(6.0 * d.x() + phase) * std::cos(5.0 * d.z());
    const bool stripe = std::fmod(std::abs(4.0 * d.y() + 10.0), 1.0) < 0.2;
    const double base = stripe ? 40.0 : 150.0 + 80.0 * s;
    auto clamp8 = [](double v) {
      return static_cast<std::uint8_t>(std::lround(std::clamp(v, 0.0, 255.0)));
    };
    col[i] = {clamp8(base + 40.0 * d.x()), clamp8(0.8 * base + 60.0 * d.z()), clamp8(255.0 - base)};
  }
  return PointCloud(std::move(pos), std::move(col));
}

/// Regular grid on the plane z = 0 over [0,1]^2, normals +z.
inline PointCloud planar_grid(std::size_t side) {
  std::vector<Vec3> pos;
  std::vector<Rgb> col;
  for (std::size_t i = 0; i < side; ++i) {
    for (std::size_t j = 0; j < side; ++j) {
      pos.emplace_back(static_cast<double>(i) / static_cast<double>(side - 1),
                       static_cast<double>(j) / static_cast<double>(side - 1), 0.0);
      col.push_back({static_cast<std::uint8_t>(i * 7), static_cast<std::uint8_t>(j * 5), 90});
    }
  }
  return PointCloud(std::move(pos), std::move(col));
}

}  // namespace pcqa::testing
