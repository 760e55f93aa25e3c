#include <doctest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "pcqa/error.hpp"
#include "pcqa/graphsim.hpp"
#include "support/fixtures.hpp"
#include "support/local_graph_check.hpp"
#include "support/toy_graph.hpp"

using namespace pcqa;

using testing::kToyCenter;
using testing::kToyValues;
using testing::ring;

TEST_CASE("toy graph: removing half the neighbors halves the mass") {
  const auto ref = ring(kToyValues, kToyCenter, 0.0);
  const auto m = testing::toy_moments(ref, testing::halved(ref));
  CHECK(m.dist.mass == 0.5 * m.ref.mass);
  CHECK(m.ref.mass == 2.0);
}

TEST_CASE("toy graph: doubling the neighbors doubles the mass, keeps the mean") {
  const auto m = testing::toy_moments(ring(kToyValues, kToyCenter, 0.0), ring(kToyValues, kToyCenter, 0.0, 2));
  REQUIRE(m.ref.matched.size() == 8);
  CHECK(m.dist.mass == 2.0 * m.ref.mass);
  CHECK(m.dist.mean == m.ref.mean);
  CHECK(m.dist.variance == m.ref.variance);
}

TEST_CASE("toy graph: rotation keeps mass and mean but not covariance") {
  const auto ref = ring(kToyValues, kToyCenter, 0.0);
  // Rotated clockwise by 30 degrees; each point keeps its value.
  const auto rot = ring(kToyValues, kToyCenter, -std::numbers::pi / 6.0);
  const auto m = testing::toy_moments(ref, rot);
  CHECK(m.dist.mass == m.ref.mass);
  CHECK(m.dist.mean == m.ref.mean);
  CHECK(graphsim::covariance(m.ref.matched, m.dist.matched) < m.ref.variance);

  const auto pair = testing::pair_of(ref, rot);
  const auto al = graphsim::match_and_align(pair, ref.cloud, rot.cloud);
  const std::vector<double> w{1.0};
  const auto s = graphsim::score_graph(pair, al, ref.signal, rot.signal, w, graphsim::GraphSimConfig{});
  CHECK(s.channels[0].sim_mass == doctest::Approx(1.0));
  CHECK(s.channels[0].sim_mean == doctest::Approx(1.0));
  CHECK(s.channels[0].sim_cov < 0.99);
  CHECK(s.score < 0.99);
}

TEST_CASE("local graphs agree with the dense oracle") {
  std::mt19937_64 rng(2024);
  std::size_t checked = 0;
  for (int trial = 0; trial < 150; ++trial) {
    const std::size_t n = 60 + rng() % 440;
    const PointCloud ref = testing::random_cloud(n, 1000 + trial);
    // Distorted: jittered, recolored subset.
    std::normal_distribution<double> g(0.0, 0.01);
    std::vector<Vec3> pos;
    std::vector<Rgb> col;
    for (std::size_t i = 0; i < n; ++i) {
      if (rng() % 4 == 0) continue;
      pos.push_back(ref.position(i) + Vec3(g(rng), g(rng), g(rng)));
      Rgb c = ref.color(i);
      c[0] = static_cast<std::uint8_t>((c[0] + rng() % 20) % 256);
      col.push_back(c);
    }
    const PointCloud dist(pos, col);
    const spatial::KdTree ri(ref), di(dist);
    const double theta = 0.1 + 0.15 * static_cast<double>(trial % 4);
    const std::size_t k = 1 + rng() % 60;
    for (int j = 0; j < 4; ++j) {
      const std::size_t kp = rng() % n;
      const std::string problem = testing::check_local_graph(ref, dist, ri, di, kp, theta, k, 1e-10);
      CHECK_MESSAGE(problem.empty(), problem);
      ++checked;
    }
  }
  CHECK(checked == 600);
}

TEST_CASE("identical clouds score one") {
  const PointCloud cloud = testing::textured_object(3000, 5);
  graphsim::GraphSimConfig c;
  c.beta_ratio = 0.01;
  for (const char* preset : {"c1", "c2", "c3", "c4"}) {
    const auto p = graphsim::parse_pooling(preset);
    c.feature_pooling = p.features;
    c.channel_pooling = p.channels;
    CHECK(graphsim::graphsim(cloud, cloud, c).quality == doctest::Approx(1.0).epsilon(1e-12));
  }
  c.signals = graphsim::parse_signals("color,coord,normal");
  CHECK(graphsim::graphsim(cloud, cloud, c).quality == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("scores stay in the unit interval") {
  const PointCloud ref = testing::textured_object(3000, 6);
  for (std::uint64_t seed = 0; seed < 5; ++seed) {
    const PointCloud other = testing::random_cloud(2000, seed);
    graphsim::GraphSimConfig c;
    c.beta_ratio = 0.02;
    for (const char* sig : {"color", "coord", "normal", "m1"}) {
      c.signals = graphsim::parse_signals(sig);
      const double q = graphsim::graphsim(ref, other, c).quality;
      CHECK(q >= 0.0);
      CHECK(q <= 1.0);
    }
  }
}

TEST_CASE("pooling and signal names") {
  CHECK(graphsim::parse_pooling("c2").features == graphsim::FeaturePooling::Multiply);
  CHECK(graphsim::parse_pooling("c2").channels == graphsim::ChannelPooling::WeightedAverage);
  CHECK(graphsim::parse_pooling("c3").features == graphsim::FeaturePooling::Average);
  CHECK(graphsim::parse_pooling("c3").channels == graphsim::ChannelPooling::Multiply);
  CHECK(graphsim::pooling_name(graphsim::FeaturePooling::Multiply, graphsim::ChannelPooling::Multiply) == "c4");
  CHECK_THROWS_AS(graphsim::parse_pooling("c5"), std::invalid_argument);
  CHECK(graphsim::parse_signals("m2") ==
        std::vector<graph::SignalKind>{graph::SignalKind::Color, graph::SignalKind::Normal});
  CHECK_THROWS_AS(graphsim::parse_signals("depth"), std::invalid_argument);
}

TEST_CASE("empty and skipped graphs") {
  // Two far-apart blobs: keypoints in the second find nothing in the distorted cloud.
  std::vector<Vec3> pos;
  std::vector<Rgb> col;
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int i = 0; i < 200; ++i) {
    pos.emplace_back(u(rng), u(rng), u(rng));
    col.push_back({100, 100, 100});
  }
  const PointCloud near(pos, col);
  for (int i = 0; i < 200; ++i) {
    pos.emplace_back(10 + u(rng), u(rng), u(rng));
    col.push_back({100, 100, 100});
  }
  const PointCloud both(pos, col);
  std::vector<std::size_t> kps{0, 1, 250, 300};
  graphsim::GraphSimConfig c;
  const auto s = graphsim::score_keypoints(both, near, kps, c);
  CHECK(s.empty == 2);
  CHECK(s.scored == 2);
  CHECK(s.quality == doctest::Approx(0.5));
  CHECK(s.graphs[2].status == graphsim::GraphStatus::Empty);

  // An isolated reference point has no theta-cluster and is excluded.
  pos.emplace_back(-50, -50, -50);
  col.push_back({1, 1, 1});
  const PointCloud lone(pos, col);
  const std::vector<std::size_t> only_lone{lone.size() - 1};
  CHECK_THROWS_AS(graphsim::score_keypoints(lone, near, only_lone, c), DomainError);
  const std::vector<std::size_t> mixed{0, lone.size() - 1};
  const auto m = graphsim::score_keypoints(lone, near, mixed, c);
  CHECK(m.skipped == 1);
  CHECK(m.quality == doctest::Approx(1.0));
}

TEST_CASE("invalid inputs") {
  const PointCloud colored = testing::random_cloud(3000, 1);
  const PointCloud bare = testing::random_cloud(3000, 1, false);
  graphsim::GraphSimConfig c;
  CHECK_THROWS_AS(graphsim::graphsim(colored, bare, c), DomainError);
  CHECK_THROWS_AS(graphsim::graphsim(PointCloud{}, colored, c), DomainError);
  c.signals = graphsim::parse_signals("coord");
  CHECK_NOTHROW(graphsim::graphsim(colored, bare, c));
  c.theta_fraction = 0.0;
  CHECK_THROWS_AS(graphsim::graphsim(colored, bare, c), DomainError);
}

TEST_CASE("parallel scoring is deterministic") {
  const PointCloud ref = testing::textured_object(5000, 8);
  const PointCloud dist = testing::random_cloud(3000, 9);
  graphsim::GraphSimConfig c;
  c.beta_ratio = 0.02;
  c.jobs = 1;
  const auto a = graphsim::graphsim(ref, dist, c);
  c.jobs = 4;
  const auto b = graphsim::graphsim(ref, dist, c);
  CHECK(a.quality == b.quality);
  REQUIRE(a.graphs.size() == b.graphs.size());
  for (std::size_t i = 0; i < a.graphs.size(); ++i) CHECK(a.graphs[i].score == b.graphs[i].score);
}
