#include <doctest.h>

#include <cmath>
#include <random>

#include "pcqa/graph.hpp"
#include "pcqa/spatial_index.hpp"
#include "support/fixtures.hpp"
#include "support/oracles.hpp"

using namespace pcqa;
using graph::SignalAttribute;

TEST_CASE("edge weight is a Gaussian cut at tau") {
  const auto p = graph::GraphParams::from_tau(0.2);
  CHECK(p.sigma2 == doctest::Approx(0.02));
  CHECK(graph::edge_weight(0.0, p) == 1.0);
  CHECK(graph::edge_weight(0.1, p) == std::exp(-0.01 / 0.02));
  CHECK(graph::edge_weight(0.2, p) == std::exp(-0.04 / 0.02));
  CHECK(graph::edge_weight(0.2000001, p) == 0.0);
  // Degenerate radius keeps unit weights for coincident neighbors.
  const auto z = graph::GraphParams::from_tau(0.0);
  CHECK(z.sigma2 == 1.0);
  CHECK(graph::edge_weight(0.0, z) == 1.0);
}

TEST_CASE("mixed weight averages the two kernels") {
  const double w = graph::mixed_edge_weight(0.1, 0.2, 0.02, 0.08, 0.3);
  CHECK(w == doctest::Approx((std::exp(-0.5) + std::exp(-0.5)) / 2.0));
  CHECK(graph::mixed_edge_weight(0.31, 0.0, 0.02, 0.08, 0.3) == 0.0);
}

TEST_CASE("neighborhood operators match the dense Laplacian") {
  std::mt19937_64 rng(8);
  for (int trial = 0; trial < 100; ++trial) {
    const PointCloud cloud = testing::random_cloud(40 + trial * 4, 300 + trial);
    const spatial::KdTree tree(cloud);
    const std::size_t center = rng() % cloud.size();
    const Vec3& q = cloud.position(center);
    const double tau = 0.1 + 0.3 * (trial % 5) / 4.0;
    const auto params = graph::GraphParams::from_tau(tau);
    const auto nbhd = graph::make_neighborhood(center, tree.radius_query(q, tau), params);
    const auto dense = oracle::dense_star(cloud.positions(), q, center, tau, params.sigma2);
    REQUIRE(nbhd.size() + 1 == dense.members.size());
    for (std::size_t j = 0; j < nbhd.size(); ++j) {
      CHECK(nbhd.neighbors[j] == dense.members[j + 1]);
      CHECK(oracle::close(nbhd.weights[j], dense.w(0, static_cast<Eigen::Index>(j + 1)), 1e-12));
    }
    CHECK(oracle::close(graph::degree(nbhd), dense.degree(), 1e-12));

    const SignalAttribute f = SignalAttribute::coordinates(cloud);
    const auto grad = graph::graph_gradient(nbhd, f);
    const auto lap = graph::laplacian_apply(nbhd, f);
    const Eigen::MatrixXd L = dense.laplacian();
    for (std::size_t c = 0; c < 3; ++c) {
      std::vector<double> fc(cloud.size());
      for (std::size_t i = 0; i < cloud.size(); ++i) fc[i] = f.at(i, c);
      Eigen::VectorXd local(static_cast<Eigen::Index>(dense.members.size()));
      for (std::size_t j = 0; j < dense.members.size(); ++j) local[static_cast<Eigen::Index>(j)] = fc[dense.members[j]];
      const double want_lap = (L * local)[0];
      double want_grad = 0.0;
      for (std::size_t j = 1; j < dense.members.size(); ++j) want_grad += oracle::edge_gradient(dense, fc, j);
      CHECK(oracle::close(lap[c], want_lap, 1e-10, 1e-12));
      CHECK(oracle::close(grad[c], want_grad, 1e-10, 1e-12));
    }
  }
}

TEST_CASE("center is never its own neighbor") {
  std::vector<Vec3> pts{{0, 0, 0}, {0, 0, 0}, {0.1, 0, 0}};
  const spatial::KdTree tree(pts);
  const auto nbhd = graph::make_neighborhood(0, tree.radius_query(pts[0], 0.5), graph::GraphParams::from_tau(0.5));
  REQUIRE(nbhd.size() == 2);
  CHECK(nbhd.neighbors[0] == 1);
  CHECK(nbhd.weights[0] == 1.0);
  CHECK(nbhd.neighbors[1] == 2);
}

TEST_CASE("signal attribute validation") {
  CHECK_THROWS_AS(SignalAttribute(graph::SignalKind::Color, 0, {}), std::invalid_argument);
  CHECK_THROWS_AS(SignalAttribute(graph::SignalKind::Color, 3, {1, 2}), std::invalid_argument);
  CHECK_THROWS_AS(SignalAttribute(graph::SignalKind::Normal, 3, {1, 1, 0}), std::invalid_argument);
  const SignalAttribute n(graph::SignalKind::Normal, 3, {0, 0, 1, 1, 0, 0});
  CHECK(n.points() == 2);
  CHECK(n.at(1, 0) == 1.0);
}
