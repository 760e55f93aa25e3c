#pragma once

#include <array>
#include <cstddef>
#include <map>
#include <span>
#include <string>
#include <vector>

namespace pcqa::eval {

/// Five-parameter monotonic logistic
///   q(x) = b1 * (1/2 - 1/(1 + exp(b2 (x - b3)))) + b4 x + b5
struct Logistic {
  std::array<double, 5> params{0, 0, 0, 0, 0};
  double operator()(double x) const;
};

struct LogisticFit {
  Logistic model;
  std::vector<double> mapped;
  bool converged = false;
  /// Fit fell back to ordinary linear least squares.
  bool linear_fallback = false;
  /// Predictions have zero variance; mapping is the MOS mean.
  bool degenerate = false;
  std::size_t iterations = 0;
};

/// Levenberg-Marquardt least squares, started from the linear fit and from
/// logistic guesses of both orientations; the lowest residual wins.
/// Requires at least 5 samples.
LogisticFit logistic_fit(std::span<const double> predictions, std::span<const double> mos);

struct Correlation {
  double value = 0.0;
  /// Zero variance on one side; value reported as 0.
  bool degenerate = false;
};

Correlation plcc(std::span<const double> x, std::span<const double> y);
/// Pearson correlation of average ranks.
Correlation srocc(std::span<const double> x, std::span<const double> y);
double rmse(std::span<const double> x, std::span<const double> y);

/// 1-based ranks, ties sharing the average rank.
std::vector<double> average_ranks(std::span<const double> values);

struct Sample {
  std::string content;
  std::string distortion;
  double prediction = 0.0;
  double mos = 0.0;
};

enum class FitScope { Global, PerGroup };

struct GroupReport {
  std::size_t n = 0;
  double plcc = 0.0;
  double srocc = 0.0;
  double rmse = 0.0;
  std::array<double, 5> logistic{0, 0, 0, 0, 0};
  bool logistic_mapped = false;  // false: n < 5, raw correlations and linear RMSE
  bool degenerate = false;
  bool linear_fallback = false;
};

struct EvalReport {
  GroupReport all;
  std::map<std::string, GroupReport> by_content;
  std::map<std::string, GroupReport> by_distortion;
  FitScope scope = FitScope::Global;
};

/// Groups with fewer than 3 samples are omitted from the breakdowns.
EvalReport evaluate(std::span<const Sample> samples, FitScope scope = FitScope::Global);

}  // namespace pcqa::eval
