#include "pcqa/point_cloud.hpp"

#include <cmath>
#include <stdexcept>

#include "pcqa/error.hpp"

namespace pcqa {

PointCloud::PointCloud(std::vector<Vec3> positions, std::optional<std::vector<Rgb>> colors,
                       std::optional<std::vector<Vec3>> normals)
    : positions_(std::move(positions)), colors_(std::move(colors)), normals_(std::move(normals)) {
  if (colors_ && colors_->size() != positions_.size()) {
    throw std::invalid_argument("color count does not match point count");
  }
  if (normals_ && normals_->size() != positions_.size()) {
    throw std::invalid_argument("normal count does not match point count");
  }
  for (std::size_t i = 0; i < positions_.size(); ++i) {
    if (!positions_[i].allFinite()) throw ValidationError("non-finite coordinate", i);
  }
  if (normals_) {
    for (std::size_t i = 0; i < normals_->size(); ++i) {
      const double norm = (*normals_)[i].norm();
      if (!std::isfinite(norm) || std::abs(norm - 1.0) > 1e-6) {
        throw ValidationError("normal is not unit length", i);
      }
    }
  }
}

std::span<const Rgb> PointCloud::colors() const {
  if (!colors_) return {};
  return *colors_;
}

std::span<const Vec3> PointCloud::normals() const {
  if (!normals_) return {};
  return *normals_;
}

PointCloud PointCloud::with_normals(std::vector<Vec3> normals) const {
  return PointCloud(positions_, colors_, std::move(normals));
}

PointCloud PointCloud::without_normals() const { return PointCloud(positions_, colors_); }

PointCloud PointCloud::subset(std::span<const std::size_t> indices) const {
  std::vector<Vec3> positions;
  positions.reserve(indices.size());
  std::optional<std::vector<Rgb>> colors;
  std::optional<std::vector<Vec3>> normals;
  if (colors_) colors.emplace().reserve(indices.size());
  if (normals_) normals.emplace().reserve(indices.size());
  for (const std::size_t i : indices) {
    positions.push_back(positions_.at(i));
    if (colors_) colors->push_back((*colors_)[i]);
    if (normals_) normals->push_back((*normals_)[i]);
  }
  return PointCloud(std::move(positions), std::move(colors), std::move(normals));
}

BoundingBox bounding_box(const PointCloud& cloud) {
  if (cloud.empty()) throw DomainError("bounding box of an empty cloud");
  BoundingBox box{cloud.position(0), cloud.position(0)};
  for (const Vec3& p : cloud.positions()) {
    box.min = box.min.cwiseMin(p);
    box.max = box.max.cwiseMax(p);
  }
  return box;
}

}  // namespace pcqa
