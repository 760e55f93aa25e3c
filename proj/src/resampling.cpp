#include "pcqa/resampling.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numeric>
#include <random>

#include "pcqa/error.hpp"
#include "pcqa/parallel.hpp"

namespace pcqa::resampling {

namespace {

// Uniform in (0, 1] from the top 53 bits.
double uniform_open0(std::mt19937_64& rng) {
  return static_cast<double>((rng() >> 11) + 1) * 0x1.0p-53;
}

// Uniform integer in [0, bound).
std::size_t uniform_below(std::size_t bound, std::mt19937_64& rng) {
  const double u = static_cast<double>(rng() >> 11) * 0x1.0p-53;
  return std::min(bound - 1, static_cast<std::size_t>(u * static_cast<double>(bound)));
}

std::vector<std::size_t> uniform_draws(std::size_t n, std::size_t count, std::mt19937_64& rng) {
  std::vector<std::size_t> pool(n);
  std::iota(pool.begin(), pool.end(), std::size_t{0});
  for (std::size_t i = 0; i < count; ++i) {
    std::swap(pool[i], pool[i + uniform_below(n - i, rng)]);
  }
  pool.resize(count);
  return pool;
}

}  // namespace

std::size_t beta_from_ratio(std::size_t n, double ratio) {
  if (!(ratio > 0.0)) throw DomainError("beta ratio must be positive");
  const auto beta = static_cast<std::size_t>(std::floor(static_cast<double>(n) * ratio));
  return std::clamp<std::size_t>(beta, 1, std::max<std::size_t>(n, 1));
}

FrequencyScores frequency_scores(const PointCloud& cloud, const spatial::KdTree& index,
                                 const ResampleConfig& config) {
  const std::size_t n = cloud.size();
  const std::size_t k = config.knn_k;
  if (k < 1) throw DomainError("shift-operator graph needs knn_k >= 1");
  if (config.filter_length < 2) throw DomainError("filter length must be at least 2");
  if (n < k + 1) {
    throw DomainError("high-pass resampling needs at least " + std::to_string(k + 1) + " points");
  }

  // Row-stochastic shift operator A = D^-1 W, stored as k entries per row.
  std::vector<std::size_t> nbr(n * k);
  std::vector<double> a(n * k);
  parallel_for(n, config.jobs, [&](std::size_t i) {
    const auto found = index.knn(cloud.position(i), k + 1);
    std::size_t m = 0;
    for (const auto& c : found) {
      if (c.index == i || m == k) continue;
      nbr[i * k + m] = c.index;
      a[i * k + m] = c.distance * c.distance;
      ++m;
    }
    double sigma2 = 0.0;
    for (std::size_t j = 0; j < k; ++j) sigma2 += a[i * k + j];
    sigma2 /= static_cast<double>(k);
    double sum = 0.0;
    for (std::size_t j = 0; j < k; ++j) {
      const double w = sigma2 > 0.0 ? std::exp(-a[i * k + j] / sigma2) : 1.0;
      a[i * k + j] = w;
      sum += w;
    }
    for (std::size_t j = 0; j < k; ++j) a[i * k + j] /= sum;
  });

  std::vector<Vec3> signal(cloud.positions().begin(), cloud.positions().end());
  std::vector<Vec3> next(n);
  for (std::size_t step = 0; step + 1 < config.filter_length; ++step) {
    parallel_for(n, config.jobs, [&](std::size_t i) {
      Vec3 shifted = Vec3::Zero();
      for (std::size_t j = 0; j < k; ++j) shifted += a[i * k + j] * signal[nbr[i * k + j]];
      next[i] = signal[i] - shifted;
    });
    std::swap(signal, next);
  }

  // Responses at rounding level (coincident points, exact planes) are zero.
  double magnitude = 0.0;
  for (const Vec3& p : cloud.positions()) magnitude = std::max(magnitude, p.cwiseAbs().maxCoeff());
  const double floor = 1e-12 * magnitude;
  FrequencyScores out;
  out.scores.resize(n);
  bool any = false;
  for (std::size_t i = 0; i < n; ++i) {
    const double s = signal[i].norm();
    out.scores[i] = s > floor ? s : 0.0;
    any = any || out.scores[i] > 0.0;
  }
  out.degenerate = !any;
  return out;
}

KeypointSet resample(const PointCloud& cloud, const spatial::KdTree& index,
                     const ResampleConfig& config) {
  const std::size_t n = cloud.size();
  if (config.beta == 0) throw DomainError("beta must be at least 1");
  if (config.beta > n) {
    throw DomainError("beta (" + std::to_string(config.beta) + ") exceeds the point count (" +
                      std::to_string(n) + ")");
  }

  KeypointSet out;
  std::mt19937_64 rng(config.seed);
  std::vector<double> scores;
  bool uniform = config.method == Method::Random;
  if (config.method == Method::HighPass) {
    FrequencyScores fs = frequency_scores(cloud, index, config);
    scores = std::move(fs.scores);
    if (fs.degenerate) {
      out.warnings.push_back("all frequency scores are zero; falling back to uniform sampling");
      uniform = true;
    }
  }

  if (config.beta == n) {
    out.indices.resize(n);
    std::iota(out.indices.begin(), out.indices.end(), std::size_t{0});
  } else if (uniform) {
    out.indices = uniform_draws(n, config.beta, rng);
  } else {
    // Weighted sampling without replacement through exponential keys
    // log(u)/w: the top-beta keys have the law of sequential draws with
    // probability proportional to the score.
    std::vector<std::pair<double, std::size_t>> keyed;
    std::vector<std::size_t> zero;
    keyed.reserve(n);
    for (std::size_t i = 0; i < n; ++i) {
      const double u = uniform_open0(rng);
      if (scores[i] > 0.0) {
        keyed.emplace_back(std::log(u) / scores[i], i);
      } else {
        zero.push_back(i);
      }
    }
    const std::size_t take = std::min(config.beta, keyed.size());
    std::partial_sort(keyed.begin(), keyed.begin() + static_cast<std::ptrdiff_t>(take), keyed.end(),
                      [](const auto& x, const auto& y) { return x.first > y.first || (x.first == y.first && x.second < y.second); });
    for (std::size_t i = 0; i < take; ++i) out.indices.push_back(keyed[i].second);
    if (take < config.beta) {
      out.warnings.push_back("fewer points with a positive score than beta; topped up uniformly");
      for (const std::size_t j : uniform_draws(zero.size(), config.beta - take, rng)) {
        out.indices.push_back(zero[j]);
      }
    }
  }

  std::sort(out.indices.begin(), out.indices.end());
  out.scores.reserve(out.indices.size());
  for (const std::size_t i : out.indices) out.scores.push_back(scores.empty() ? 0.0 : scores[i]);
  return out;
}

void write_keypoints_csv(const PointCloud& cloud, const KeypointSet& keypoints,
                         const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::trunc);
  if (!out) throw IoError("cannot write " + path.string());
  out.precision(17);
  out << "index,score,x,y,z\n";
  for (std::size_t i = 0; i < keypoints.indices.size(); ++i) {
    const Vec3& p = cloud.position(keypoints.indices[i]);
    out << keypoints.indices[i] << ',' << keypoints.scores[i] << ',' << p.x() << ',' << p.y()
        << ',' << p.z() << '\n';
  }
  if (!out) throw IoError("write failed for " + path.string());
}

}  // namespace pcqa::resampling
