#include "pcqa/graphsim.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <optional>
#include <stdexcept>

#include "pcqa/baselines.hpp"
#include "pcqa/error.hpp"
#include "pcqa/parallel.hpp"
#include "pcqa/simd/kernels.hpp"

namespace pcqa::graphsim {

using graph::SignalAttribute;
using graph::SignalKind;
using graph::WeightedNeighborhood;

PoolingPreset parse_pooling(std::string_view name) {
  if (name == "c1") return {FeaturePooling::Average, ChannelPooling::WeightedAverage};
  if (name == "c2") return {FeaturePooling::Multiply, ChannelPooling::WeightedAverage};
  if (name == "c3") return {FeaturePooling::Average, ChannelPooling::Multiply};
  if (name == "c4") return {FeaturePooling::Multiply, ChannelPooling::Multiply};
  throw std::invalid_argument("unknown pooling '" + std::string(name) + "' (expected c1..c4)");
}

std::string pooling_name(FeaturePooling features, ChannelPooling channels) {
  const bool avg_f = features == FeaturePooling::Average;
  const bool avg_c = channels == ChannelPooling::WeightedAverage;
  if (avg_f && avg_c) return "c1";
  if (!avg_f && avg_c) return "c2";
  if (avg_f) return "c3";
  return "c4";
}

std::vector<SignalKind> parse_signals(std::string_view spec) {
  if (spec == "mixed" || spec == "m1") return {SignalKind::Color, SignalKind::Coordinate};
  if (spec == "m2") return {SignalKind::Color, SignalKind::Normal};
  std::vector<SignalKind> kinds;
  std::size_t start = 0;
  while (start <= spec.size()) {
    const std::size_t comma = spec.find(',', start);
    const std::string_view item =
        spec.substr(start, comma == std::string_view::npos ? std::string_view::npos : comma - start);
    SignalKind kind;
    if (item == "color") {
      kind = SignalKind::Color;
    } else if (item == "coord" || item == "coordinate") {
      kind = SignalKind::Coordinate;
    } else if (item == "normal") {
      kind = SignalKind::Normal;
    } else {
      throw std::invalid_argument("unknown signal '" + std::string(item) + "'");
    }
    if (std::find(kinds.begin(), kinds.end(), kind) == kinds.end()) kinds.push_back(kind);
    if (comma == std::string_view::npos) break;
    start = comma + 1;
  }
  return kinds;
}

std::string_view signal_name(SignalKind kind) {
  switch (kind) {
    case SignalKind::Color:
      return "color";
    case SignalKind::Coordinate:
      return "coord";
    case SignalKind::Normal:
      return "normal";
  }
  return "unknown";
}

namespace {

std::vector<spatial::Neighbor> within(std::vector<spatial::Neighbor> found, double radius) {
  std::erase_if(found, [radius](const spatial::Neighbor& n) { return n.distance > radius; });
  return found;
}

// Distance of the k-th nearest entry of an ascending list, or its last entry
// when it holds fewer than k.
double kth_or_max(const std::vector<double>& ascending, std::size_t k) {
  if (ascending.empty()) return 0.0;
  return ascending[std::min(k, ascending.size()) - 1];
}

std::vector<double> distances_without(const std::vector<spatial::Neighbor>& found, std::size_t center) {
  std::vector<double> out;
  for (const auto& n : found) {
    if (n.index != center) out.push_back(n.distance);
  }
  return out;
}

WeightedNeighborhood mixed_neighborhood(std::size_t center, const std::vector<spatial::Neighbor>& candidates,
                                        const PointCloud& cloud, const Vec3& keypoint_color,
                                        double tau, const GraphSimConfig& config, double scale) {
  const double tau_n = tau / scale;
  const double sigma_geo = tau_n > 0.0 ? tau_n * tau_n / 2.0 : 1.0;
  const double sigma_col = config.mixed_color_sigma2 > 0.0 ? config.mixed_color_sigma2 : sigma_geo;
  WeightedNeighborhood nbhd;
  nbhd.center = center;
  for (const auto& c : candidates) {
    if (c.index == center || c.distance > tau) continue;
    const double color_distance = (color::normalized(cloud.color(c.index)) - keypoint_color).norm();
    nbhd.neighbors.push_back(c.index);
    nbhd.weights.push_back(
        graph::mixed_edge_weight(c.distance / scale, color_distance, sigma_geo, sigma_col, tau_n));
    nbhd.distances.push_back(c.distance);
  }
  return nbhd;
}

}  // namespace

LocalGraphPair build_local_graph_pair(std::size_t keypoint, CloudRef ref, CloudRef dist,
                                      double theta, const GraphSimConfig& config,
                                      double geometry_scale) {
  LocalGraphPair pair;
  pair.keypoint = keypoint;
  pair.center = ref.cloud.position(keypoint);
  const std::size_t k = std::max<std::size_t>(config.matching_k, 1);

  // k + 1 nearest per side covers the k nearest of the merged clusters once
  // each side's own center is removed.
  const auto ref_near = within(ref.index.knn(pair.center, k + 1), theta);
  if (ref_near.size() < 2) {
    pair.skipped = true;
    return pair;
  }
  const auto dist_near = within(dist.index.knn(pair.center, k + 1), theta);
  pair.ref.center = ref_near.front().index;
  if (dist_near.empty()) {
    pair.empty = true;
    return pair;
  }
  pair.dist.center = dist_near.front().index;

  std::vector<double> ref_d = distances_without(ref_near, pair.ref.center);
  std::vector<double> dist_d = distances_without(dist_near, pair.dist.center);
  if (config.tau_scope == TauScope::Union) {
    std::vector<double> merged;
    merged.reserve(ref_d.size() + dist_d.size());
    std::merge(ref_d.begin(), ref_d.end(), dist_d.begin(), dist_d.end(), std::back_inserter(merged));
    pair.tau = kth_or_max(merged, k);
  } else {
    pair.tau = std::max(kth_or_max(ref_d, k), kth_or_max(dist_d, k));
  }
  const graph::GraphParams params = graph::GraphParams::from_tau(pair.tau);
  pair.sigma2 = params.sigma2;

  const auto ref_candidates = ref.index.radius_query(pair.center, pair.tau);
  const auto dist_candidates = dist.index.radius_query(pair.center, pair.tau);
  if (config.mixed_graph) {
    if (!ref.cloud.has_colors() || !dist.cloud.has_colors()) {
      throw DomainError("mixed graph weights need colors on both clouds");
    }
    const Vec3 ref_color = color::normalized(ref.cloud.color(pair.ref.center));
    const Vec3 dist_color = color::normalized(dist.cloud.color(pair.dist.center));
    pair.ref = mixed_neighborhood(pair.ref.center, ref_candidates, ref.cloud, ref_color, pair.tau,
                                  config, geometry_scale);
    pair.dist = mixed_neighborhood(pair.dist.center, dist_candidates, dist.cloud, dist_color,
                                   pair.tau, config, geometry_scale);
  } else {
    pair.ref = graph::make_neighborhood(pair.ref.center, ref_candidates, params);
    pair.dist = graph::make_neighborhood(pair.dist.center, dist_candidates, params);
  }
  pair.empty = pair.ref.empty() || pair.dist.empty();
  return pair;
}

Alignment match_and_align(const LocalGraphPair& pair, const PointCloud& ref, const PointCloud& dist) {
  Alignment out;
  if (pair.ref.empty() || pair.dist.empty()) return out;

  const bool ref_is_base = pair.ref.size() <= pair.dist.size();
  const WeightedNeighborhood& base = ref_is_base ? pair.ref : pair.dist;
  const WeightedNeighborhood& other = ref_is_base ? pair.dist : pair.ref;
  const PointCloud& base_cloud = ref_is_base ? ref : dist;
  const PointCloud& other_cloud = ref_is_base ? dist : ref;

  const std::size_t m = other.size();
  std::vector<double> xs(m), ys(m), zs(m), d2(m);
  for (std::size_t j = 0; j < m; ++j) {
    const Vec3& p = other_cloud.position(other.neighbors[j]);
    xs[j] = p.x();
    ys[j] = p.y();
    zs[j] = p.z();
  }

  std::vector<std::size_t> base_order(base.size());
  std::vector<std::size_t> other_order(base.size());
  for (std::size_t i = 0; i < base.size(); ++i) {
    const Vec3& q = base_cloud.position(base.neighbors[i]);
    simd::squared_distances(xs, ys, zs, q.x(), q.y(), q.z(), d2);
    std::size_t best = 0;
    for (std::size_t j = 1; j < m; ++j) {
      if (d2[j] < d2[best] || (d2[j] == d2[best] && other.neighbors[j] < other.neighbors[best])) best = j;
    }
    base_order[i] = i;
    other_order[i] = best;
  }
  out.ref_order = ref_is_base ? std::move(base_order) : std::move(other_order);
  out.dist_order = ref_is_base ? std::move(other_order) : std::move(base_order);
  return out;
}

GradientMoments gradient_moments(const WeightedNeighborhood& nbhd, const SignalAttribute& f,
                                 std::span<const std::size_t> matched_order) {
  GradientMoments out;
  out.undefined = matched_order.empty();
  out.channels.resize(f.channels());
  const double n = static_cast<double>(matched_order.size());
  for (std::size_t c = 0; c < f.channels(); ++c) {
    ChannelMoments& m = out.channels[c];
    const std::vector<double> all = graph::edge_gradients(nbhd, f, c);
    for (const double g : all) m.mass += g;
    if (out.undefined) continue;
    m.matched.reserve(matched_order.size());
    for (const std::size_t j : matched_order) m.matched.push_back(all.at(j));
    double sum = 0.0;
    for (const double g : m.matched) sum += g;
    m.mean = sum / n;
    double ss = 0.0;
    for (const double g : m.matched) ss += (g - m.mean) * (g - m.mean);
    m.variance = ss / n;
  }
  return out;
}

double covariance(std::span<const double> g, std::span<const double> g_prime) {
  if (g.size() != g_prime.size() || g.empty()) {
    throw std::logic_error("covariance needs two non-empty sequences of equal length");
  }
  const double n = static_cast<double>(g.size());
  double sum = 0.0;
  double sum_prime = 0.0;
  for (std::size_t i = 0; i < g.size(); ++i) {
    sum += g[i];
    sum_prime += g_prime[i];
  }
  const double mean = sum / n;
  const double mean_prime = sum_prime / n;
  // Centered form of E[g g'] - E[g] E[g']; bit-identical to the variance
  // when g' == g.
  double acc = 0.0;
  for (std::size_t i = 0; i < g.size(); ++i) acc += (g[i] - mean) * (g_prime[i] - mean_prime);
  return acc / n;
}

namespace {

double ratio_similarity(double a, double b, double stabilizer) {
  return (2.0 * a * b + stabilizer) / (a * a + b * b + stabilizer);
}

double pool_channels(const std::vector<ChannelSimilarity>& channels, std::span<const double> weights,
                     ChannelPooling pooling) {
  double gamma = 0.0;
  for (std::size_t c = 0; c < channels.size(); ++c) gamma += weights[c];
  if (!(gamma > 0.0)) throw std::invalid_argument("channel weights must not all be zero");
  if (pooling == ChannelPooling::WeightedAverage) {
    double acc = 0.0;
    for (std::size_t c = 0; c < channels.size(); ++c) acc += weights[c] * std::abs(channels[c].pooled);
    return acc / gamma;
  }
  // Weighted geometric mean: the product of |S_C|^(gamma_C / gamma).
  double acc = 1.0;
  for (std::size_t c = 0; c < channels.size(); ++c) {
    if (weights[c] == 0.0) continue;
    acc *= std::pow(std::abs(channels[c].pooled), weights[c] / gamma);
  }
  return acc;
}

}  // namespace

GraphScore score_graph(const LocalGraphPair& pair, const Alignment& alignment,
                       const SignalAttribute& ref_signal, const SignalAttribute& dist_signal,
                       std::span<const double> channel_weights, const GraphSimConfig& config) {
  GraphScore out;
  if (pair.skipped || pair.empty || alignment.ref_order.empty()) {
    out.empty = true;
    return out;
  }
  if (ref_signal.channels() != dist_signal.channels() || channel_weights.size() < ref_signal.channels()) {
    throw std::invalid_argument("signal channel counts disagree");
  }
  const GradientMoments r = gradient_moments(pair.ref, ref_signal, alignment.ref_order);
  const GradientMoments d = gradient_moments(pair.dist, dist_signal, alignment.dist_order);

  out.channels.resize(ref_signal.channels());
  for (std::size_t c = 0; c < ref_signal.channels(); ++c) {
    const ChannelMoments& mr = r.channels[c];
    const ChannelMoments& md = d.channels[c];
    ChannelSimilarity& s = out.channels[c];
    s.sim_mass = ratio_similarity(mr.mass, md.mass, config.t0);
    s.sim_mean = ratio_similarity(mr.mean, md.mean, config.t1);
    // sqrt(var_r * var_d) equals var exactly when both variances match.
    s.sim_cov = (covariance(mr.matched, md.matched) + config.t2) /
                (std::sqrt(mr.variance * md.variance) + config.t2);
    s.pooled = config.feature_pooling == FeaturePooling::Multiply
                   ? s.sim_mass * s.sim_mean * s.sim_cov
                   : (s.sim_mass + s.sim_mean + s.sim_cov) / 3.0;
  }
  out.score = pool_channels(out.channels, channel_weights, config.channel_pooling);
  return out;
}

namespace {

struct PreparedSignals {
  std::vector<SignalKind> kinds;
  std::vector<SignalAttribute> ref;
  std::vector<SignalAttribute> dist;
  std::vector<std::vector<double>> weights;
};

SignalAttribute signal_for(SignalKind kind, const PointCloud& cloud, const spatial::KdTree& index,
                           const GraphSimConfig& config) {
  switch (kind) {
    case SignalKind::Color:
      return color::decompose(cloud, config.color);
    case SignalKind::Coordinate:
      return SignalAttribute::coordinates(cloud);
    case SignalKind::Normal: {
      if (cloud.size() < config.normal_k) {
        throw DomainError("normal signal needs at least " + std::to_string(config.normal_k) + " points");
      }
      return SignalAttribute::normals(baselines::estimate_normals(cloud, index, config.normal_k).normals);
    }
  }
  throw std::logic_error("unhandled signal kind");
}

}  // namespace

SimilarityScore score_keypoints(const PointCloud& ref, const PointCloud& dist,
                                std::span<const std::size_t> keypoints,
                                const GraphSimConfig& config) {
  if (ref.empty()) throw DomainError("reference cloud is empty");
  if (dist.empty()) throw DomainError("distorted cloud is empty");
  if (config.signals.empty()) throw DomainError("no signal kind selected");
  if (!(config.theta_fraction > 0.0)) throw DomainError("theta fraction must be positive");
  if (config.matching_k < 1) throw DomainError("matching k must be at least 1");
  if (!(config.t0 > 0.0 && config.t1 > 0.0 && config.t2 > 0.0)) {
    throw DomainError("stabilizers must be positive");
  }
  for (const SignalKind kind : config.signals) {
    if (kind == SignalKind::Color && (!ref.has_colors() || !dist.has_colors())) {
      throw DomainError("color signal requested but a cloud has no colors; use --signal coord or normal");
    }
  }

  const spatial::KdTree ref_index(ref);
  const spatial::KdTree dist_index(dist);
  const BoundingBox box = bounding_box(ref);
  const double theta = config.theta_fraction * box.min_extent();
  const double scale = box.max_extent() > 0.0 ? box.max_extent() : 1.0;

  PreparedSignals signals;
  for (const SignalKind kind : config.signals) {
    signals.kinds.push_back(kind);
    signals.ref.push_back(signal_for(kind, ref, ref_index, config));
    signals.dist.push_back(signal_for(kind, dist, dist_index, config));
    if (kind == SignalKind::Color) {
      signals.weights.emplace_back(config.color.weights.begin(), config.color.weights.end());
    } else {
      signals.weights.push_back({1.0, 1.0, 1.0});
    }
  }

  SimilarityScore out;
  out.keypoints.indices.assign(keypoints.begin(), keypoints.end());
  out.keypoints.scores.assign(keypoints.size(), 0.0);
  out.graphs.resize(keypoints.size());
  const CloudRef ref_side{ref, ref_index};
  const CloudRef dist_side{dist, dist_index};
  parallel_for(keypoints.size(), config.jobs, [&](std::size_t i) {
    GraphRecord& record = out.graphs[i];
    record.keypoint = keypoints[i];
    const LocalGraphPair pair = build_local_graph_pair(keypoints[i], ref_side, dist_side, theta, config, scale);
    record.tau = pair.tau;
    record.ref_neighbors = pair.ref.size();
    record.dist_neighbors = pair.dist.size();
    if (pair.skipped) {
      record.status = GraphStatus::Skipped;
      return;
    }
    if (pair.empty) {
      record.status = GraphStatus::Empty;
      return;
    }
    const Alignment alignment = match_and_align(pair, ref, dist);
    double total = 0.0;
    for (std::size_t s = 0; s < signals.kinds.size(); ++s) {
      record.kinds.push_back(
          score_graph(pair, alignment, signals.ref[s], signals.dist[s], signals.weights[s], config));
      total += record.kinds.back().score;
    }
    record.score = total / static_cast<double>(signals.kinds.size());
  });

  // Ordered reduction for reproducibility.
  double total = 0.0;
  out.channel_means.resize(signals.kinds.size());
  for (std::size_t s = 0; s < signals.kinds.size(); ++s) {
    out.channel_means[s].assign(signals.ref[s].channels(), 0.0);
  }
  for (const GraphRecord& record : out.graphs) {
    switch (record.status) {
      case GraphStatus::Skipped:
        ++out.skipped;
        continue;
      case GraphStatus::Empty:
        ++out.empty;
        break;
      case GraphStatus::Scored:
        ++out.scored;
        for (std::size_t s = 0; s < record.kinds.size(); ++s) {
          for (std::size_t c = 0; c < record.kinds[s].channels.size(); ++c) {
            out.channel_means[s][c] += record.kinds[s].channels[c].pooled;
          }
        }
        break;
    }
    total += record.score;
  }
  const std::size_t counted = out.scored + out.empty;
  if (counted == 0) {
    throw DomainError("no keypoint formed a local graph (theta = " + std::to_string(theta) +
                      "); the reference may be flat along one axis");
  }
  out.quality = total / static_cast<double>(counted);
  for (auto& means : out.channel_means) {
    for (double& m : means) m = out.scored > 0 ? m / static_cast<double>(out.scored) : 0.0;
  }
  if (out.skipped > 0) {
    out.warnings.push_back(std::to_string(out.skipped) + " keypoints had fewer than two points within theta");
  }
  if (out.empty > 0) {
    out.warnings.push_back(std::to_string(out.empty) + " keypoint graphs were empty on the distorted side");
  }
  return out;
}

SimilarityScore graphsim(const PointCloud& ref, const PointCloud& dist, const GraphSimConfig& config) {
  if (ref.empty()) throw DomainError("reference cloud is empty");
  const spatial::KdTree ref_index(ref);
  resampling::ResampleConfig rc = config.resample;
  rc.beta = resampling::beta_from_ratio(ref.size(), config.beta_ratio);
  rc.jobs = config.jobs;
  resampling::KeypointSet keypoints = resampling::resample(ref, ref_index, rc);
  SimilarityScore out = score_keypoints(ref, dist, keypoints.indices, config);
  out.warnings.insert(out.warnings.begin(), keypoints.warnings.begin(), keypoints.warnings.end());
  out.keypoints = std::move(keypoints);
  return out;
}

}  // namespace pcqa::graphsim
