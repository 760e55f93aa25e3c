#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include <Eigen/Core>

namespace pcqa {

using Vec3 = Eigen::Vector3d;
using Rgb = std::array<std::uint8_t, 3>;

/// Positions with optional per-point colors and unit normals.
///
/// All attribute sequences have the same length as the positions. The
/// constructor validates that, plus finiteness of coordinates and unit norm
/// of normals, so a PointCloud that exists is always consistent.
class PointCloud {
 public:
  PointCloud() = default;
  explicit PointCloud(std::vector<Vec3> positions,
                      std::optional<std::vector<Rgb>> colors = std::nullopt,
                      std::optional<std::vector<Vec3>> normals = std::nullopt);

  std::size_t size() const { return positions_.size(); }
  bool empty() const { return positions_.empty(); }

  std::span<const Vec3> positions() const { return positions_; }
  const Vec3& position(std::size_t i) const { return positions_[i]; }

  bool has_colors() const { return colors_.has_value(); }
  std::span<const Rgb> colors() const;
  const Rgb& color(std::size_t i) const { return (*colors_)[i]; }

  bool has_normals() const { return normals_.has_value(); }
  std::span<const Vec3> normals() const;

  PointCloud with_normals(std::vector<Vec3> normals) const;
  PointCloud without_normals() const;

  /// Cloud restricted to `indices`, in the given order.
  PointCloud subset(std::span<const std::size_t> indices) const;

 private:
  std::vector<Vec3> positions_;
  std::optional<std::vector<Rgb>> colors_;
  std::optional<std::vector<Vec3>> normals_;
};

struct BoundingBox {
  Vec3 min = Vec3::Zero();
  Vec3 max = Vec3::Zero();

  Vec3 extents() const { return max - min; }
  /// Smallest axis extent (the local-graph radius scale).
  double min_extent() const { return extents().minCoeff(); }
  /// Largest axis extent (the geometry PSNR peak scale).
  double max_extent() const { return extents().maxCoeff(); }
};

/// Componentwise extrema. Throws DomainError on an empty cloud.
BoundingBox bounding_box(const PointCloud& cloud);

}  // namespace pcqa
