#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "pcqa/point_cloud.hpp"
#include "pcqa/spatial_index.hpp"

namespace pcqa::resampling {

enum class Method { HighPass, Random };

struct ResampleConfig {
  std::size_t beta = 1;           // keypoint count
  std::size_t filter_length = 4;  // L; the filter is (I - A)^(L-1)
  std::size_t knn_k = 10;         // neighbors of the shift-operator graph
  Method method = Method::HighPass;
  std::uint64_t seed = 0;
  std::size_t jobs = 1;
};

/// floor(n * ratio), at least 1 (and at most n).
std::size_t beta_from_ratio(std::size_t n, double ratio);

struct FrequencyScores {
  std::vector<double> scores;
  /// Set when every score is zero (e.g. all points coincide).
  bool degenerate = false;
};

/// Magnitude of the Haar-like high-pass response of each point's position.
///
/// The shift operator is A = D^-1 W on the knn_k-nearest-neighbor graph with
/// Gaussian weights whose variance is the point's mean squared neighbor
/// distance. Requires at least knn_k + 1 points.
FrequencyScores frequency_scores(const PointCloud& cloud, const spatial::KdTree& index,
                                 const ResampleConfig& config);

struct KeypointSet {
  std::vector<std::size_t> indices;  // ascending
  std::vector<double> scores;        // score of each selected point (0 for random)
  std::vector<std::string> warnings;
};

/// Draws `beta` distinct points. High-pass sampling is proportional to the
/// frequency score; random sampling is uniform. Deterministic per seed.
KeypointSet resample(const PointCloud& cloud, const spatial::KdTree& index,
                     const ResampleConfig& config);

/// CSV dump: index,score,x,y,z.
void write_keypoints_csv(const PointCloud& cloud, const KeypointSet& keypoints,
                         const std::filesystem::path& path);

}  // namespace pcqa::resampling
