#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "pcqa/point_cloud.hpp"

namespace pcqa::spatial {

struct Neighbor {
  std::size_t index = 0;
  double distance = 0.0;

  friend bool operator==(const Neighbor&, const Neighbor&) = default;
};

/// Static kd-tree over a cloud's positions with exact queries.
///
/// Results are ordered by ascending Euclidean distance, ties by ascending
/// point index, so every query is deterministic and equal to a brute-force
/// scan. The tree copies the coordinates it needs; the source cloud does
/// not have to outlive it. Queries are const and thread-safe.
class KdTree {
 public:
  /// Throws DomainError when `points` is empty.
  explicit KdTree(std::span<const Vec3> points, std::size_t leaf_size = 32);
  explicit KdTree(const PointCloud& cloud, std::size_t leaf_size = 32)
      : KdTree(cloud.positions(), leaf_size) {}

  std::size_t size() const { return source_count_; }

  std::vector<Neighbor> knn(const Vec3& query, std::size_t k) const;
  /// Throws DomainError for a negative radius.
  std::vector<Neighbor> radius_query(const Vec3& query, double radius) const;
  Neighbor nearest(const Vec3& query) const;

 private:
  struct Node {
    // Leaf when split_axis < 0: points [begin, end) of the permuted arrays.
    std::uint32_t begin = 0;
    std::uint32_t end = 0;
    std::int32_t split_axis = -1;
    double split_value = 0.0;
    std::uint32_t left = 0;
    std::uint32_t right = 0;
  };

  std::uint32_t build(std::uint32_t begin, std::uint32_t end);

  template <typename Visitor>
  void search(const Vec3& query, Visitor& visitor) const;

  std::size_t source_count_ = 0;
  std::size_t leaf_size_ = 32;
  std::vector<Node> nodes_;
  std::vector<std::size_t> order_;  // permuted position -> source index
  std::vector<double> xs_, ys_, zs_;
};

/// For every point of `from`, the index of the nearest point in `to`.
std::vector<std::size_t> match_points(const PointCloud& from, const KdTree& to);

}  // namespace pcqa::spatial
