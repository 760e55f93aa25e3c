#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "pcqa/color.hpp"
#include "pcqa/graph.hpp"
#include "pcqa/point_cloud.hpp"
#include "pcqa/resampling.hpp"
#include "pcqa/spatial_index.hpp"

namespace pcqa::graphsim {

enum class FeaturePooling { Multiply, Average };
enum class ChannelPooling { WeightedAverage, Multiply };

/// Which points define tau: the k nearest of the two clusters merged, or the
/// larger of each cluster's own k-th nearest distance.
enum class TauScope { Union, PerCluster };

struct PoolingPreset {
  FeaturePooling features;
  ChannelPooling channels;
};
/// c1 = [avg, avg], c2 = [mul, avg], c3 = [avg, mul], c4 = [mul, mul].
PoolingPreset parse_pooling(std::string_view name);
std::string pooling_name(FeaturePooling features, ChannelPooling channels);

/// Accepts color, coord, normal, comma lists of those, and the aliases
/// m1 (color+coord), m2 (color+normal), mixed (= m1).
std::vector<graph::SignalKind> parse_signals(std::string_view spec);
std::string_view signal_name(graph::SignalKind kind);

struct GraphSimConfig {
  double theta_fraction = 0.1;  // theta = fraction * B
  std::size_t matching_k = 50;  // tau = distance of the k-th nearest cluster point
  double t0 = 0.001;
  double t1 = 0.001;
  double t2 = 0.001;
  color::ColorSpaceConfig color = color::ColorSpaceConfig::defaults(color::Space::Gcm);
  FeaturePooling feature_pooling = FeaturePooling::Multiply;
  ChannelPooling channel_pooling = ChannelPooling::WeightedAverage;
  std::vector<graph::SignalKind> signals{graph::SignalKind::Color};
  double beta_ratio = 0.001;
  resampling::ResampleConfig resample{};  // beta is derived from beta_ratio
  TauScope tau_scope = TauScope::Union;
  bool mixed_graph = false;         // experimental geometry+color edge weights
  double mixed_color_sigma2 = 0.0;  // 0: use the geometric sigma^2
  std::size_t normal_k = 12;
  std::size_t jobs = 1;
};

struct CloudRef {
  const PointCloud& cloud;
  const spatial::KdTree& index;
};

/// A keypoint's local graphs in the reference and distorted clouds.
struct LocalGraphPair {
  std::size_t keypoint = 0;  // index into the reference cloud
  Vec3 center = Vec3::Zero();
  graph::WeightedNeighborhood ref;
  graph::WeightedNeighborhood dist;
  double tau = 0.0;
  double sigma2 = 1.0;
  /// Reference theta-cluster holds fewer than two points.
  bool skipped = false;
  /// No distorted point survives within theta and tau (or no reference edge).
  bool empty = false;
};

/// Gathers the theta-clusters around reference point `keypoint` in both
/// clouds, derives tau and sigma^2 and keeps the tau-connected neighbors.
///
/// The reference graph is centered on the keypoint itself; the distorted
/// graph on the distorted point nearest to it. Edge lengths are always
/// measured from the keypoint position. `geometry_scale` normalizes geometry
/// for the mixed-weight option.
LocalGraphPair build_local_graph_pair(std::size_t keypoint, CloudRef ref, CloudRef dist,
                                      double theta, const GraphSimConfig& config,
                                      double geometry_scale = 1.0);

/// Positions into pair.ref / pair.dist that correspond after matching.
struct Alignment {
  std::vector<std::size_t> ref_order;
  std::vector<std::size_t> dist_order;
};

/// The smaller neighborhood is the baseline; each of its points is paired
/// with the nearest point of the other neighborhood (many-to-one allowed).
Alignment match_and_align(const LocalGraphPair& pair, const PointCloud& ref,
                          const PointCloud& dist);

struct ChannelMoments {
  double mass = 0.0;      // m_g, over all retained neighbors
  double mean = 0.0;      // mu_g, over the matched sequence
  double variance = 0.0;  // sigma^2_g, population, over the matched sequence
  std::vector<double> matched;  // edge gradients in matched order
};

struct GradientMoments {
  std::vector<ChannelMoments> channels;
  /// No matched neighbor: mean and variance are undefined (left at 0).
  bool undefined = false;
};

GradientMoments gradient_moments(const graph::WeightedNeighborhood& nbhd,
                                 const graph::SignalAttribute& f,
                                 std::span<const std::size_t> matched_order);

/// Population covariance E[g g'] - E[g] E[g'].
double covariance(std::span<const double> g, std::span<const double> g_prime);

struct ChannelSimilarity {
  double sim_mass = 0.0;
  double sim_mean = 0.0;
  double sim_cov = 0.0;
  double pooled = 0.0;  // S_{s_k,C}
};

struct GraphScore {
  std::vector<ChannelSimilarity> channels;
  double score = 0.0;  // S_{s_k}
  bool empty = false;
};

/// Similarity of one signal kind over a local graph pair.
GraphScore score_graph(const LocalGraphPair& pair, const Alignment& alignment,
                       const graph::SignalAttribute& ref_signal,
                       const graph::SignalAttribute& dist_signal,
                       std::span<const double> channel_weights, const GraphSimConfig& config);

enum class GraphStatus { Scored, Empty, Skipped };

struct GraphRecord {
  std::size_t keypoint = 0;
  GraphStatus status = GraphStatus::Scored;
  double score = 0.0;
  std::size_t ref_neighbors = 0;
  std::size_t dist_neighbors = 0;
  double tau = 0.0;
  /// One entry per signal kind (empty unless status == Scored).
  std::vector<GraphScore> kinds;
};

struct SimilarityScore {
  double quality = 0.0;  // Q
  std::vector<GraphRecord> graphs;
  /// Mean S_{s_k,C} over scored graphs, per signal kind and channel.
  std::vector<std::vector<double>> channel_means;
  std::size_t scored = 0;
  std::size_t empty = 0;
  std::size_t skipped = 0;
  resampling::KeypointSet keypoints;
  std::vector<std::string> warnings;
};

/// Full metric: resample the reference, score every keypoint graph, average.
SimilarityScore graphsim(const PointCloud& ref, const PointCloud& dist,
                         const GraphSimConfig& config);

/// Scores a fixed keypoint set (reference indices), skipping resampling.
SimilarityScore score_keypoints(const PointCloud& ref, const PointCloud& dist,
                                std::span<const std::size_t> keypoints,
                                const GraphSimConfig& config);

}  // namespace pcqa::graphsim
