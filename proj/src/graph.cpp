#include "pcqa/graph.hpp"

#include <cmath>
#include <stdexcept>

#include "pcqa/simd/kernels.hpp"

namespace pcqa::graph {

GraphParams GraphParams::from_tau(double tau) {
  return GraphParams{tau, tau > 0.0 ? tau * tau / 2.0 : 1.0};
}

double edge_weight(double distance, const GraphParams& params) {
  if (distance > params.tau) return 0.0;
  return std::exp(-(distance * distance) / params.sigma2);
}

double mixed_edge_weight(double geometry_distance, double color_distance, double geometry_sigma2,
                         double color_sigma2, double tau) {
  if (geometry_distance > tau) return 0.0;
  const double geometric = std::exp(-(geometry_distance * geometry_distance) / geometry_sigma2);
  const double photometric = std::exp(-(color_distance * color_distance) / color_sigma2);
  return (geometric + photometric) / 2.0;
}

WeightedNeighborhood make_neighborhood(std::size_t center,
                                       std::span<const spatial::Neighbor> candidates,
                                       const GraphParams& params) {
  WeightedNeighborhood nbhd;
  nbhd.center = center;
  for (const spatial::Neighbor& c : candidates) {
    if (c.index == center || c.distance > params.tau) continue;
    nbhd.neighbors.push_back(c.index);
    nbhd.weights.push_back(edge_weight(c.distance, params));
    nbhd.distances.push_back(c.distance);
  }
  return nbhd;
}

SignalAttribute::SignalAttribute(SignalKind kind, std::size_t channels, std::vector<double> values)
    : kind_(kind), channels_(channels), values_(std::move(values)) {
  if (channels_ < 1 || channels_ > 3) throw std::invalid_argument("signal needs 1 to 3 channels");
  if (values_.size() % channels_ != 0) throw std::invalid_argument("signal size not a multiple of channels");
  if (kind_ == SignalKind::Normal) {
    for (std::size_t p = 0; p < points(); ++p) {
      double n2 = 0.0;
      for (std::size_t c = 0; c < channels_; ++c) n2 += at(p, c) * at(p, c);
      if (std::abs(std::sqrt(n2) - 1.0) > 1e-6) throw std::invalid_argument("normal signal is not unit length");
    }
  }
}

SignalAttribute SignalAttribute::coordinates(const PointCloud& cloud) {
  std::vector<double> values;
  values.reserve(cloud.size() * 3);
  for (const Vec3& p : cloud.positions()) values.insert(values.end(), {p.x(), p.y(), p.z()});
  return SignalAttribute(SignalKind::Coordinate, 3, std::move(values));
}

SignalAttribute SignalAttribute::normals(std::span<const Vec3> normals) {
  std::vector<double> values;
  values.reserve(normals.size() * 3);
  for (const Vec3& n : normals) values.insert(values.end(), {n.x(), n.y(), n.z()});
  return SignalAttribute(SignalKind::Normal, 3, std::move(values));
}

double degree(const WeightedNeighborhood& nbhd) {
  double sum = 0.0;
  for (const double w : nbhd.weights) sum += w;
  return sum;
}

std::vector<double> edge_gradients(const WeightedNeighborhood& nbhd, const SignalAttribute& f,
                                   std::size_t channel) {
  std::vector<double> values(nbhd.size());
  for (std::size_t j = 0; j < nbhd.size(); ++j) values[j] = f.at(nbhd.neighbors[j], channel);
  std::vector<double> out(nbhd.size());
  simd::weighted_differences(nbhd.weights, values, f.at(nbhd.center, channel), out);
  return out;
}

std::vector<double> graph_gradient(const WeightedNeighborhood& nbhd, const SignalAttribute& f) {
  std::vector<double> out(f.channels(), 0.0);
  for (std::size_t c = 0; c < f.channels(); ++c) {
    for (const double g : edge_gradients(nbhd, f, c)) out[c] += g;
  }
  return out;
}

std::vector<double> laplacian_apply(const WeightedNeighborhood& nbhd, const SignalAttribute& f) {
  std::vector<double> out(f.channels(), 0.0);
  for (std::size_t c = 0; c < f.channels(); ++c) {
    const double center = f.at(nbhd.center, c);
    for (std::size_t j = 0; j < nbhd.size(); ++j) {
      out[c] += nbhd.weights[j] * (center - f.at(nbhd.neighbors[j], c));
    }
  }
  return out;
}

}  // namespace pcqa::graph
