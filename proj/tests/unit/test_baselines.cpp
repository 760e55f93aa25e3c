#include <doctest.h>

#include <cmath>
#include <limits>

#include "pcqa/baselines.hpp"
#include "pcqa/error.hpp"
#include "support/fixtures.hpp"

using namespace pcqa;
using namespace pcqa::baselines;

namespace {

PointCloud shifted(const PointCloud& c, const Vec3& by) {
  std::vector<Vec3> pos;
  for (const auto& p : c.positions()) pos.push_back(p + by);
  return PointCloud(pos, std::vector<Rgb>(c.colors().begin(), c.colors().end()));
}

}  // namespace

TEST_CASE("plane moved along its normal") {
  const PointCloud plane = testing::planar_grid(21);
  const double delta = 0.01;
  const PointCloud moved = shifted(plane, Vec3(0, 0, delta));
  for (const auto agg : {Aggregation::Mse, Aggregation::Hausdorff}) {
    const auto po = p2_errors(plane, moved, ErrorMode::Point, agg);
    const auto pl = p2_errors(plane, moved, ErrorMode::Plane, agg);
    CHECK(po.symmetric() == doctest::Approx(delta * delta).epsilon(1e-9));
    CHECK(pl.symmetric() == doctest::Approx(delta * delta).epsilon(1e-9));
  }
}

TEST_CASE("plane slid within itself") {
  const PointCloud plane = testing::planar_grid(21);
  const double delta = 0.01;  // under half the grid spacing
  const PointCloud moved = shifted(plane, Vec3(delta, 0, 0));
  const auto po = p2_errors(plane, moved, ErrorMode::Point, Aggregation::Mse);
  const auto pl = p2_errors(plane, moved, ErrorMode::Plane, Aggregation::Mse);
  CHECK(po.forward == doctest::Approx(delta * delta).epsilon(1e-9));
  CHECK(po.backward == doctest::Approx(delta * delta).epsilon(1e-9));
  CHECK(pl.symmetric() < 1e-6 * delta * delta);
}

TEST_CASE("directions differ when one cloud has an extra point") {
  const PointCloud plane = testing::planar_grid(11);
  std::vector<Vec3> pos(plane.positions().begin(), plane.positions().end());
  pos.emplace_back(0.5, 0.5, 1.0);
  const PointCloud extra(pos);
  const auto h = p2_errors(plane, extra, ErrorMode::Point, Aggregation::Hausdorff);
  CHECK(h.forward == doctest::Approx(1.0));
  CHECK(h.backward == 0.0);
  CHECK(h.symmetric() == doctest::Approx(1.0));
  const auto m = p2_errors(plane, extra, ErrorMode::Point, Aggregation::Mse);
  CHECK(m.forward == doctest::Approx(1.0 / 122.0));
}

TEST_CASE("identical clouds give infinite PSNR for every metric") {
  const PointCloud cloud = testing::textured_object(2000, 3);
  for (const Metric m : kAllMetrics) {
    const auto r = compute(m, cloud, cloud);
    CHECK(std::isinf(r.value));
    CHECK(r.value > 0);
  }
}

TEST_CASE("geometry PSNR peak") {
  const BoundingBox box{Vec3(0, 0, 0), Vec3(2, 1, 1)};
  CHECK(geometry_psnr(12.0, box) == doctest::Approx(0.0));
  CHECK(geometry_psnr(1.2, box) == doctest::Approx(10.0));
  CHECK(std::isinf(geometry_psnr(0.0, box)));
  CHECK_THROWS_AS(geometry_psnr(-1.0, box), DomainError);
}

TEST_CASE("YUV PSNR combination") {
  CHECK(combine_yuv_psnr(30, 30, 30) == 30);
  CHECK(combine_yuv_psnr(40, 0, 0) == 30);
  const PointCloud plane = testing::planar_grid(11);
  std::vector<Rgb> col(plane.colors().begin(), plane.colors().end());
  for (auto& c : col) c[0] = static_cast<std::uint8_t>(c[0] + 10);
  const PointCloud recolored(std::vector<Vec3>(plane.positions().begin(), plane.positions().end()), col);
  const auto y = psnr_yuv(plane, recolored);
  // A red shift of 10 moves Y by 2.126 levels on every point.
  CHECK(y.y == doctest::Approx(10.0 * std::log10(255.0 * 255.0 / (2.126 * 2.126))).epsilon(1e-9));
  CHECK(std::isfinite(y.combined));
  CHECK_THROWS_AS(psnr_yuv(plane, PointCloud(std::vector<Vec3>{Vec3::Zero()})), DomainError);
}

TEST_CASE("PCA normals are oriented and flag degenerate neighborhoods") {
  const PointCloud plane = testing::planar_grid(10);
  const spatial::KdTree index(plane);
  const auto est = estimate_normals(plane, index, 12);
  CHECK(est.degenerate.empty());
  for (const auto& n : est.normals) {
    CHECK(n.z() == doctest::Approx(1.0));
  }
  std::vector<Vec3> line;
  for (int i = 0; i < 20; ++i) line.emplace_back(i, 0, 0);
  const PointCloud lc(line);
  const auto bad = estimate_normals(lc, spatial::KdTree(lc), 5);
  CHECK(bad.degenerate.size() == 20);
  CHECK_THROWS_AS(estimate_normals(lc, spatial::KdTree(lc), 2), DomainError);
  CHECK_THROWS_AS(estimate_normals(lc, spatial::KdTree(lc), 21), DomainError);

  // A tilted plane whose normal points down gets flipped up.
  std::vector<Vec3> tilted;
  for (int i = 0; i < 10; ++i)
    for (int j = 0; j < 10; ++j) tilted.emplace_back(i, j, 0.5 * i);
  const PointCloud tc(tilted);
  for (const auto& n : estimate_normals(tc, spatial::KdTree(tc), 8).normals) {
    CHECK(n.z() > 0);
    CHECK(n.x() == doctest::Approx(-0.5 / std::sqrt(1.25)));
  }
}

TEST_CASE("metric names") {
  for (const Metric m : kAllMetrics) CHECK(parse_metric(metric_name(m)) == m);
  CHECK_THROWS_AS(parse_metric("psnr"), std::invalid_argument);
}
