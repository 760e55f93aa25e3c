#include <doctest.h>

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <random>
#include <set>

#include "pcqa/error.hpp"
#include "pcqa/resampling.hpp"
#include "support/fixtures.hpp"

using namespace pcqa;
using resampling::ResampleConfig;

TEST_CASE("beta follows the floor rule") {
  CHECK(resampling::beta_from_ratio(729133, 0.001) == 729);
  CHECK(resampling::beta_from_ratio(999, 0.001) == 1);
  CHECK(resampling::beta_from_ratio(10, 0.55) == 5);
  CHECK(resampling::beta_from_ratio(10, 2.0) == 10);
  CHECK_THROWS_AS(resampling::beta_from_ratio(10, 0.0), DomainError);
}

namespace {

PointCloud lattice_line(std::size_t n) {
  std::vector<Vec3> pts;
  for (std::size_t i = 0; i < n; ++i) pts.emplace_back(static_cast<double>(i), 0.0, 0.0);
  return PointCloud(pts);
}

// Gaussian blob plus one far point at the last index.
PointCloud cluster_with_outlier(std::size_t n, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> g(0.0, 0.1);
  std::vector<Vec3> pts;
  for (std::size_t i = 0; i + 1 < n; ++i) pts.emplace_back(g(rng), g(rng), g(rng));
  pts.emplace_back(3.0, 0.0, 0.0);
  return PointCloud(pts);
}

}  // namespace

TEST_CASE("high-pass response vanishes on a lattice interior and peaks at its ends") {
  const PointCloud line = lattice_line(100);
  const spatial::KdTree index(line);
  const auto fs = resampling::frequency_scores(line, index, ResampleConfig{});
  const double edge = std::min(fs.scores.front(), fs.scores.back());
  CHECK(edge > 0.0);
  // Three passes of a 5-point-per-side stencil reach 15 points inward.
  for (std::size_t i = 15; i < 85; ++i) CHECK(fs.scores[i] < 1e-6 * edge);
  for (std::size_t i = 1; i < 99; ++i) CHECK(fs.scores[i] < std::max(fs.scores.front(), fs.scores.back()));
}

TEST_CASE("an isolated outlier has the largest score") {
  for (std::uint64_t seed = 0; seed < 5; ++seed) {
    const PointCloud cloud = cluster_with_outlier(200, seed);
    const spatial::KdTree index(cloud);
    const auto fs = resampling::frequency_scores(cloud, index, ResampleConfig{});
    const auto top = std::max_element(fs.scores.begin(), fs.scores.end()) - fs.scores.begin();
    CHECK(static_cast<std::size_t>(top) == cloud.size() - 1);
  }
}

TEST_CASE("scores scale linearly with the cloud") {
  const PointCloud cloud = testing::random_cloud(300, 12, false);
  std::vector<Vec3> scaled;
  for (const auto& p : cloud.positions()) scaled.push_back(4.0 * p);
  const PointCloud big(scaled);
  const auto a = resampling::frequency_scores(cloud, spatial::KdTree(cloud), ResampleConfig{});
  const auto b = resampling::frequency_scores(big, spatial::KdTree(big), ResampleConfig{});
  for (std::size_t i = 0; i < cloud.size(); ++i) CHECK(b.scores[i] == doctest::Approx(4.0 * a.scores[i]).epsilon(1e-12));
}

TEST_CASE("high-pass sampling favors the outlier over random sampling") {
  const PointCloud cloud = cluster_with_outlier(200, 77);
  const spatial::KdTree index(cloud);
  std::size_t high = 0;
  std::size_t uniform = 0;
  for (std::uint64_t seed = 0; seed < 200; ++seed) {
    ResampleConfig c;
    c.beta = 10;
    c.seed = seed;
    const auto a = resampling::resample(cloud, index, c);
    high += std::count(a.indices.begin(), a.indices.end(), cloud.size() - 1);
    c.method = resampling::Method::Random;
    const auto b = resampling::resample(cloud, index, c);
    uniform += std::count(b.indices.begin(), b.indices.end(), cloud.size() - 1);
  }
  CHECK(high >= 2 * std::max<std::size_t>(uniform, 1));
}

TEST_CASE("filter length and neighbor count are validated") {
  const PointCloud cloud = testing::random_cloud(20, 2, false);
  const spatial::KdTree index(cloud);
  ResampleConfig c;
  c.filter_length = 1;
  CHECK_THROWS_AS(resampling::frequency_scores(cloud, index, c), DomainError);
  c = ResampleConfig{};
  c.knn_k = 20;
  CHECK_THROWS_AS(resampling::frequency_scores(cloud, index, c), DomainError);
}

TEST_CASE("sampling draws distinct, sorted, seeded keypoints") {
  const PointCloud cloud = testing::textured_object(4000, 1);
  const spatial::KdTree index(cloud);
  for (const auto method : {resampling::Method::HighPass, resampling::Method::Random}) {
    ResampleConfig c;
    c.method = method;
    c.beta = 300;
    c.seed = 42;
    const auto a = resampling::resample(cloud, index, c);
    const auto b = resampling::resample(cloud, index, c);
    CHECK(a.indices == b.indices);
    CHECK(a.indices.size() == 300);
    CHECK(std::is_sorted(a.indices.begin(), a.indices.end()));
    CHECK(std::set<std::size_t>(a.indices.begin(), a.indices.end()).size() == 300);
    c.seed = 43;
    CHECK(resampling::resample(cloud, index, c).indices != a.indices);
  }
}

TEST_CASE("edge cases of the keypoint count") {
  const PointCloud cloud = testing::random_cloud(50, 3, false);
  const spatial::KdTree index(cloud);
  ResampleConfig c;
  c.beta = 51;
  CHECK_THROWS_AS(resampling::resample(cloud, index, c), DomainError);
  c.beta = 0;
  CHECK_THROWS_AS(resampling::resample(cloud, index, c), DomainError);
  c.beta = 50;
  const auto all = resampling::resample(cloud, index, c);
  REQUIRE(all.indices.size() == 50);
  for (std::size_t i = 0; i < 50; ++i) CHECK(all.indices[i] == i);
}

TEST_CASE("coincident points fall back to uniform sampling") {
  const PointCloud same(std::vector<Vec3>(30, Vec3(1, 2, 3)));
  const spatial::KdTree index(same);
  ResampleConfig c;
  c.beta = 5;
  const auto fs = resampling::frequency_scores(same, index, c);
  CHECK(fs.degenerate);
  const auto kp = resampling::resample(same, index, c);
  CHECK(kp.indices.size() == 5);
  CHECK(kp.warnings.size() == 1);
}

TEST_CASE("keypoint CSV") {
  const PointCloud cloud = testing::random_cloud(30, 4, false);
  const spatial::KdTree index(cloud);
  ResampleConfig c;
  c.beta = 3;
  c.method = resampling::Method::Random;
  const auto kp = resampling::resample(cloud, index, c);
  const auto path = std::filesystem::temp_directory_path() / "pcqa_keypoints.csv";
  resampling::write_keypoints_csv(cloud, kp, path);
  std::ifstream in(path);
  std::string line;
  std::getline(in, line);
  CHECK(line == "index,score,x,y,z");
  std::size_t rows = 0;
  while (std::getline(in, line)) ++rows;
  CHECK(rows == 3);
}
