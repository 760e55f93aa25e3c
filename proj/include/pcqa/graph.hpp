#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "pcqa/point_cloud.hpp"
#include "pcqa/spatial_index.hpp"

namespace pcqa::graph {

/// Clustering threshold tau and Gaussian variance sigma^2 of the edge weights.
struct GraphParams {
  double tau = 0.0;
  double sigma2 = 1.0;

  /// sigma^2 = tau^2 / 2; a zero tau (all neighbors coincide) keeps sigma^2 = 1,
  /// which leaves every retained weight at exp(0) = 1.
  static GraphParams from_tau(double tau);
};

/// Gaussian weight exp(-d^2/sigma^2) for d <= tau, else 0.
double edge_weight(double distance, const GraphParams& params);

/// Mean of a geometric and a color Gaussian kernel, gated by the geometric
/// distance only. Inputs are expected in [0,1]-normalized units.
double mixed_edge_weight(double geometry_distance, double color_distance, double geometry_sigma2,
                         double color_sigma2, double tau);

/// Edges from one center vertex. Indices refer to the cloud the neighborhood
/// was built on; the center is never its own neighbor.
struct WeightedNeighborhood {
  std::size_t center = 0;
  std::vector<std::size_t> neighbors;
  std::vector<double> weights;
  std::vector<double> distances;

  std::size_t size() const { return neighbors.size(); }
  bool empty() const { return neighbors.empty(); }
};

/// Keeps the candidates within tau (excluding `center`), weighted per
/// edge_weight. Candidate order is preserved.
WeightedNeighborhood make_neighborhood(std::size_t center,
                                       std::span<const spatial::Neighbor> candidates,
                                       const GraphParams& params);

enum class SignalKind { Color, Coordinate, Normal };

/// Per-point signal with 1 to 3 channels, stored point-major.
class SignalAttribute {
 public:
  SignalAttribute(SignalKind kind, std::size_t channels, std::vector<double> values);

  static SignalAttribute coordinates(const PointCloud& cloud);
  static SignalAttribute normals(std::span<const Vec3> normals);

  SignalKind kind() const { return kind_; }
  std::size_t channels() const { return channels_; }
  std::size_t points() const { return values_.size() / channels_; }
  double at(std::size_t point, std::size_t channel) const {
    return values_[point * channels_ + channel];
  }

 private:
  SignalKind kind_;
  std::size_t channels_;
  std::vector<double> values_;
};

/// Sum of the center's incident weights.
double degree(const WeightedNeighborhood& nbhd);

/// Per channel: sum_j sqrt(w_j) * (f_j - f_center).
std::vector<double> graph_gradient(const WeightedNeighborhood& nbhd, const SignalAttribute& f);

/// Per channel: sum_j w_j * (f_center - f_j), i.e. row `center` of (D - W) f.
std::vector<double> laplacian_apply(const WeightedNeighborhood& nbhd, const SignalAttribute& f);

/// Edge-weighted differences sqrt(w_j) * (f_j - f_center) of one channel, in
/// neighbor order.
std::vector<double> edge_gradients(const WeightedNeighborhood& nbhd, const SignalAttribute& f,
                                   std::size_t channel);

}  // namespace pcqa::graph
