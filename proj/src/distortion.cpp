#include "pcqa/distortion.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <map>
#include <numeric>
#include <random>
#include <stdexcept>
#include <string>

#include "pcqa/error.hpp"

namespace pcqa::distortion {

namespace {

constexpr std::array<double, kPresetLevels> kColorNoise{0.02, 0.04, 0.07, 0.10, 0.14, 0.20};
constexpr std::array<double, kPresetLevels> kGeometryNoise{0.003, 0.006, 0.012, 0.024, 0.048, 0.096};
constexpr std::array<double, kPresetLevels> kDownsample{0.9, 0.75, 0.6, 0.45, 0.3, 0.15};
constexpr std::array<double, kPresetLevels> kOctree{9, 8, 7, 6, 5, 4};

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9E3779B97F4A7C15ULL;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
  return x ^ (x >> 31);
}

PointCloud color_noise(const PointCloud& cloud, double level, std::mt19937_64& rng) {
  if (!cloud.has_colors()) throw DomainError("color noise needs a colored cloud");
  if (!(level >= 0.0 && level <= 1.0)) throw DomainError("color noise level must be in [0, 1]");
  if (level == 0.0) return cloud;
  std::normal_distribution<double> gauss(0.0, level * 255.0);
  std::vector<Rgb> colors(cloud.colors().begin(), cloud.colors().end());
  for (Rgb& c : colors) {
    for (std::uint8_t& channel : c) {
      const double v = std::round(channel + gauss(rng));
      channel = static_cast<std::uint8_t>(std::clamp(v, 0.0, 255.0));
    }
  }
  std::optional<std::vector<Vec3>> normals;
  if (cloud.has_normals()) normals.emplace(cloud.normals().begin(), cloud.normals().end());
  return PointCloud({cloud.positions().begin(), cloud.positions().end()}, std::move(colors), std::move(normals));
}

PointCloud geometry_noise(const PointCloud& cloud, double level, std::mt19937_64& rng) {
  if (!(level >= 0.0)) throw DomainError("geometry noise level must be non-negative");
  if (level == 0.0 || cloud.empty()) return cloud;
  const double sigma = level * bounding_box(cloud).min_extent();
  if (sigma == 0.0) return cloud;
  std::normal_distribution<double> gauss(0.0, sigma);
  std::vector<Vec3> positions(cloud.positions().begin(), cloud.positions().end());
  for (Vec3& p : positions) {
    for (int a = 0; a < 3; ++a) p[a] += gauss(rng);
  }
  std::optional<std::vector<Rgb>> colors;
  if (cloud.has_colors()) colors.emplace(cloud.colors().begin(), cloud.colors().end());
  // Displaced points no longer carry valid normals.
  return PointCloud(std::move(positions), std::move(colors));
}

PointCloud downsample(const PointCloud& cloud, double keep, std::mt19937_64& rng) {
  if (!(keep > 0.0 && keep <= 1.0)) throw DomainError("downsample keep ratio must be in (0, 1]");
  const auto count = static_cast<std::size_t>(std::llround(static_cast<double>(cloud.size()) * keep));
  if (count == 0) throw DomainError("downsampling keeps no point");
  if (count >= cloud.size()) return cloud;
  std::vector<std::size_t> order(cloud.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  for (std::size_t i = 0; i < count; ++i) {
    std::uniform_int_distribution<std::size_t> pick(i, order.size() - 1);
    std::swap(order[i], order[pick(rng)]);
  }
  order.resize(count);
  std::sort(order.begin(), order.end());
  return cloud.subset(order);
}

// Power-of-two voxel size no smaller than extent / 2^depth. Lattice points are
// integer multiples of it, so a second pass at the same depth is a no-op.
double voxel_size(double extent, int depth) {
  const double target = std::ldexp(extent, -depth);
  int exponent = 0;
  const double mantissa = std::frexp(target, &exponent);
  return mantissa == 0.5 ? target : std::ldexp(1.0, exponent);
}

PointCloud octree(const PointCloud& cloud, double level) {
  if (!(level >= 1.0 && level <= 24.0) || level != std::floor(level)) {
    throw DomainError("octree depth must be an integer in [1, 24]");
  }
  if (cloud.empty()) return cloud;
  const double extent = bounding_box(cloud).max_extent();
  if (extent == 0.0) return cloud.without_normals();
  const double cell = voxel_size(extent, static_cast<int>(level));

  struct Voxel {
    Vec3 position;
    std::array<std::uint64_t, 3> color_sum{0, 0, 0};
    std::uint64_t count = 0;
  };
  std::map<std::array<std::int64_t, 3>, std::size_t> slots;
  std::vector<Voxel> voxels;
  for (std::size_t i = 0; i < cloud.size(); ++i) {
    std::array<std::int64_t, 3> key;
    Vec3 snapped;
    for (int a = 0; a < 3; ++a) {
      const double q = std::round(cloud.position(i)[a] / cell);
      key[a] = static_cast<std::int64_t>(q);
      snapped[a] = q * cell;
    }
    const auto [it, inserted] = slots.emplace(key, voxels.size());
    if (inserted) voxels.push_back(Voxel{snapped});
    Voxel& v = voxels[it->second];
    ++v.count;
    if (cloud.has_colors()) {
      for (int c = 0; c < 3; ++c) v.color_sum[c] += cloud.color(i)[c];
    }
  }
  std::vector<Vec3> positions;
  positions.reserve(voxels.size());
  std::optional<std::vector<Rgb>> colors;
  if (cloud.has_colors()) colors.emplace().reserve(voxels.size());
  for (const Voxel& v : voxels) {
    positions.push_back(v.position);
    if (colors) {
      Rgb c;
      for (int k = 0; k < 3; ++k) {
        c[k] = static_cast<std::uint8_t>((v.color_sum[k] * 2 + v.count) / (2 * v.count));
      }
      colors->push_back(c);
    }
  }
  return PointCloud(std::move(positions), std::move(colors));
}

}  // namespace

std::string_view kind_name(Kind kind) {
  switch (kind) {
    case Kind::ColorNoise:
      return "cn";
    case Kind::GeometryNoise:
      return "ggn";
    case Kind::Downsample:
      return "ds";
    case Kind::Octree:
      return "ot";
  }
  return "unknown";
}

Kind parse_kind(std::string_view name) {
  if (name == "cn") return Kind::ColorNoise;
  if (name == "ggn") return Kind::GeometryNoise;
  if (name == "ds") return Kind::Downsample;
  if (name == "ot") return Kind::Octree;
  throw std::invalid_argument("unknown distortion kind '" + std::string(name) + "'");
}

double preset_level(Kind kind, int index) {
  if (index < 1 || index > kPresetLevels) throw DomainError("preset level must be in 1..6");
  const auto i = static_cast<std::size_t>(index - 1);
  switch (kind) {
    case Kind::ColorNoise:
      return kColorNoise[i];
    case Kind::GeometryNoise:
      return kGeometryNoise[i];
    case Kind::Downsample:
      return kDownsample[i];
    case Kind::Octree:
      return kOctree[i];
  }
  return 0.0;
}

PointCloud apply(const PointCloud& cloud, const DistortionSpec& spec) {
  PointCloud out = cloud;
  for (std::size_t s = 0; s < spec.steps.size(); ++s) {
    std::mt19937_64 rng(splitmix64(spec.seed + s));
    const Step& step = spec.steps[s];
    switch (step.kind) {
      case Kind::ColorNoise:
        out = color_noise(out, step.level, rng);
        break;
      case Kind::GeometryNoise:
        out = geometry_noise(out, step.level, rng);
        break;
      case Kind::Downsample:
        out = downsample(out, step.level, rng);
        break;
      case Kind::Octree:
        out = octree(out, step.level);
        break;
    }
  }
  return out;
}

std::vector<Step> parse_steps(std::string_view kinds, const std::vector<double>& levels) {
  std::vector<Step> steps;
  std::size_t start = 0;
  while (true) {
    const std::size_t plus = kinds.find('+', start);
    steps.push_back(Step{parse_kind(kinds.substr(start, plus == std::string_view::npos ? plus : plus - start)), 0.0});
    if (plus == std::string_view::npos) break;
    start = plus + 1;
  }
  if (levels.size() != steps.size()) {
    throw std::invalid_argument("expected " + std::to_string(steps.size()) + " levels, got " +
                                std::to_string(levels.size()));
  }
  for (std::size_t i = 0; i < steps.size(); ++i) steps[i].level = levels[i];
  return steps;
}

}  // namespace pcqa::distortion
