#include <doctest.h>

#include <random>

#include "pcqa/error.hpp"
#include "pcqa/spatial_index.hpp"
#include "support/fixtures.hpp"
#include "support/oracles.hpp"

using namespace pcqa;

namespace {

void expect_same(const std::vector<spatial::Neighbor>& got, const std::vector<oracle::Hit>& want) {
  REQUIRE(got.size() == want.size());
  for (std::size_t i = 0; i < got.size(); ++i) {
    CHECK(got[i].index == want[i].index);
    CHECK(got[i].distance == std::sqrt(want[i].d2));
  }
}

}  // namespace

TEST_CASE("knn and radius agree with a full scan") {
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> u(-0.2, 1.2);
  for (int trial = 0; trial < 60; ++trial) {
    const std::size_t n = 1 + trial * 7;
    const PointCloud cloud = testing::random_cloud(n, 1000 + trial, false);
    const spatial::KdTree tree(cloud.positions(), 1 + trial % 9);
    for (int q = 0; q < 10; ++q) {
      const Vec3 query(u(rng), u(rng), u(rng));
      const std::size_t k = 1 + (q * 5) % (n + 3);
      expect_same(tree.knn(query, k), oracle::knn(cloud.positions(), query, k));
      const double r = 0.05 * q;
      expect_same(tree.radius_query(query, r), oracle::radius(cloud.positions(), query, r));
    }
  }
}

TEST_CASE("ties on a lattice resolve by index") {
  std::vector<Vec3> pts;
  for (int x = 0; x < 6; ++x)
    for (int y = 0; y < 6; ++y)
      for (int z = 0; z < 3; ++z) pts.emplace_back(x, y, z);
  // Duplicates of the query point too.
  pts.emplace_back(2, 2, 1);
  pts.emplace_back(2, 2, 1);
  const spatial::KdTree tree(pts, 4);
  const Vec3 q(2, 2, 1);
  for (std::size_t k : {1, 3, 7, 19, 27, 200}) expect_same(tree.knn(q, k), oracle::knn(pts, q, k));
  expect_same(tree.radius_query(q, 1.0), oracle::radius(pts, q, 1.0));
  expect_same(tree.radius_query(q, std::sqrt(2.0)), oracle::radius(pts, q, std::sqrt(2.0)));
  CHECK(tree.nearest(q).index == 2 * 18 + 2 * 3 + 1);
}

TEST_CASE("coincident points form a valid index") {
  std::vector<Vec3> pts(100, Vec3(0.5, 0.5, 0.5));
  const spatial::KdTree tree(pts, 8);
  const auto found = tree.knn(Vec3(0, 0, 0), 5);
  REQUIRE(found.size() == 5);
  for (std::size_t i = 0; i < 5; ++i) CHECK(found[i].index == i);
  CHECK(tree.radius_query(Vec3(0.5, 0.5, 0.5), 0.0).size() == 100);
}

TEST_CASE("argument errors") {
  CHECK_THROWS_AS(spatial::KdTree(std::span<const Vec3>{}), DomainError);
  const PointCloud cloud = testing::random_cloud(10, 1, false);
  const spatial::KdTree tree(cloud);
  CHECK_THROWS_AS(tree.knn(Vec3::Zero(), 0), DomainError);
  CHECK_THROWS_AS(tree.radius_query(Vec3::Zero(), -1.0), DomainError);
  CHECK(tree.knn(Vec3::Zero(), 50).size() == 10);
}

TEST_CASE("match_points pairs with nearest neighbors") {
  const PointCloud a = testing::random_cloud(200, 5, false);
  const PointCloud b = testing::random_cloud(150, 6, false);
  const spatial::KdTree tb(b);
  const auto m = spatial::match_points(a, tb);
  REQUIRE(m.size() == a.size());
  for (std::size_t i = 0; i < a.size(); ++i) {
    CHECK(m[i] == oracle::knn(b.positions(), a.position(i), 1).front().index);
  }
}
