#include "pcqa/eval.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <optional>
#include <stdexcept>

#include <Eigen/Dense>

#include "pcqa/error.hpp"

namespace pcqa::eval {

namespace {

using Params = Eigen::Matrix<double, 5, 1>;

double mean_of(std::span<const double> v) {
  return std::accumulate(v.begin(), v.end(), 0.0) / static_cast<double>(v.size());
}

void check_pair(std::span<const double> x, std::span<const double> y) {
  if (x.size() != y.size()) throw std::invalid_argument("sample lengths differ");
  if (x.empty()) throw DomainError("no samples");
}

double logistic_value(const Params& b, double x) {
  const double s = 1.0 / (1.0 + std::exp(b[1] * (x - b[2])));
  return b[0] * (0.5 - s) + b[3] * x + b[4];
}

double sse(const Params& b, std::span<const double> x, std::span<const double> y) {
  double acc = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double r = logistic_value(b, x[i]) - y[i];
    acc += r * r;
  }
  return acc;
}

struct Run {
  Params b;
  double sse = std::numeric_limits<double>::infinity();
  std::size_t iterations = 0;
  bool converged = false;
};

Run levenberg_marquardt(Params b, std::span<const double> x, std::span<const double> y) {
  constexpr std::size_t kMaxIterations = 500;
  Run run{b, sse(b, x, y), 0, false};
  if (!std::isfinite(run.sse)) return run;
  double lambda = 1e-3;
  for (std::size_t it = 0; it < kMaxIterations; ++it) {
    run.iterations = it + 1;
    Eigen::Matrix<double, 5, 5> jtj = Eigen::Matrix<double, 5, 5>::Zero();
    Params jtr = Params::Zero();
    for (std::size_t i = 0; i < x.size(); ++i) {
      const double s = 1.0 / (1.0 + std::exp(b[1] * (x[i] - b[2])));
      const double ds = s * (1.0 - s);
      Params j;
      j << 0.5 - s, b[0] * ds * (x[i] - b[2]), -b[0] * ds * b[1], x[i], 1.0;
      const double r = logistic_value(b, x[i]) - y[i];
      jtj += j * j.transpose();
      jtr += j * r;
    }
    if (jtr.norm() < 1e-14 * (1.0 + run.sse)) {
      run.converged = true;
      break;
    }
    bool improved = false;
    while (lambda < 1e12) {
      Eigen::Matrix<double, 5, 5> damped = jtj;
      for (int d = 0; d < 5; ++d) damped(d, d) += lambda * (jtj(d, d) + 1e-9);
      const Params step = damped.ldlt().solve(-jtr);
      const Params candidate = b + step;
      const double candidate_sse = sse(candidate, x, y);
      if (std::isfinite(candidate_sse) && candidate_sse < run.sse) {
        const double gain = run.sse - candidate_sse;
        b = candidate;
        run.b = b;
        lambda = std::max(lambda / 10.0, 1e-12);
        improved = true;
        if (gain <= 1e-13 * run.sse || step.norm() <= 1e-12 * (1.0 + b.norm())) run.converged = true;
        run.sse = candidate_sse;
        break;
      }
      lambda *= 10.0;
    }
    if (!improved) {
      // No descent direction left at any damping: a stationary point.
      run.converged = true;
      break;
    }
    if (run.converged) break;
  }
  return run;
}

// Least-squares line y = a x + c.
std::pair<double, double> linear_fit(std::span<const double> x, std::span<const double> y) {
  const double mx = mean_of(x);
  const double my = mean_of(y);
  double sxy = 0.0;
  double sxx = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sxy += (x[i] - mx) * (y[i] - my);
    sxx += (x[i] - mx) * (x[i] - mx);
  }
  const double a = sxx > 0.0 ? sxy / sxx : 0.0;
  return {a, my - a * mx};
}

double stddev(std::span<const double> v, double mean) {
  double acc = 0.0;
  for (const double e : v) acc += (e - mean) * (e - mean);
  return std::sqrt(acc / static_cast<double>(v.size()));
}

}  // namespace

double Logistic::operator()(double x) const {
  const double s = 1.0 / (1.0 + std::exp(params[1] * (x - params[2])));
  return params[0] * (0.5 - s) + params[3] * x + params[4];
}

LogisticFit logistic_fit(std::span<const double> predictions, std::span<const double> mos) {
  check_pair(predictions, mos);
  if (predictions.size() < 5) throw DomainError("logistic fitting needs at least 5 samples");
  for (std::size_t i = 0; i < predictions.size(); ++i) {
    if (!std::isfinite(predictions[i]) || !std::isfinite(mos[i])) throw DomainError("non-finite sample");
  }
  const std::size_t n = predictions.size();
  const double mx = mean_of(predictions);
  const double my = mean_of(mos);
  const double sx = stddev(predictions, mx);
  const double sy = stddev(mos, my);

  LogisticFit fit;
  if (!(sx > 0.0) || !(sy > 0.0)) {
    // Constant predictions (or constant MOS): the best mapping is the MOS mean.
    fit.model.params = {0.0, 0.0, 0.0, 0.0, my};
    fit.mapped.assign(n, my);
    fit.degenerate = !(sx > 0.0);
    fit.converged = true;
    fit.linear_fallback = true;
    return fit;
  }

  // Fit in standardized coordinates, then map the parameters back.
  std::vector<double> x(n);
  std::vector<double> y(n);
  for (std::size_t i = 0; i < n; ++i) {
    x[i] = (predictions[i] - mx) / sx;
    y[i] = (mos[i] - my) / sy;
  }
  std::vector<double> sorted_x = x;
  std::nth_element(sorted_x.begin(), sorted_x.begin() + static_cast<std::ptrdiff_t>(n / 2), sorted_x.end());
  const double median = sorted_x[n / 2];
  const auto [y_lo, y_hi] = std::minmax_element(y.begin(), y.end());
  const double range = *y_hi - *y_lo;
  const auto [slope, intercept] = linear_fit(x, y);

  Params linear;
  linear << 0.0, 1.0, 0.0, slope, intercept;
  Run best = levenberg_marquardt(linear, x, y);
  bool best_is_linear = true;
  for (const double orientation : {1.0, -1.0}) {
    for (const double steepness : {1.0, 3.0}) {
      Params start;
      start << range, orientation * steepness, median, 0.0, 0.0;
      const Run run = levenberg_marquardt(start, x, y);
      if (run.sse < best.sse * (1.0 - 1e-12)) {
        best = run;
        best_is_linear = false;
      }
    }
  }

  const Params& b = best.b;
  fit.model.params = {sy * b[0], b[1] / sx, mx + sx * b[2], sy * b[3] / sx, my + sy * (b[4] - b[3] * mx / sx)};
  fit.mapped.resize(n);
  // Evaluate through the standardized model so the mapped values carry no
  // extra rounding from the back-transformed parameters.
  for (std::size_t i = 0; i < n; ++i) fit.mapped[i] = my + sy * logistic_value(b, x[i]);
  fit.converged = best.converged;
  fit.linear_fallback = best_is_linear;
  fit.iterations = best.iterations;
  return fit;
}

Correlation plcc(std::span<const double> x, std::span<const double> y) {
  check_pair(x, y);
  const double mx = mean_of(x);
  const double my = mean_of(y);
  double sxy = 0.0;
  double sxx = 0.0;
  double syy = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sxy += (x[i] - mx) * (y[i] - my);
    sxx += (x[i] - mx) * (x[i] - mx);
    syy += (y[i] - my) * (y[i] - my);
  }
  if (!(sxx > 0.0) || !(syy > 0.0)) return {0.0, true};
  return {std::clamp(sxy / std::sqrt(sxx * syy), -1.0, 1.0), false};
}

std::vector<double> average_ranks(std::span<const double> values) {
  std::vector<std::size_t> order(values.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return values[a] < values[b]; });
  std::vector<double> ranks(values.size());
  std::size_t i = 0;
  while (i < order.size()) {
    std::size_t j = i;
    while (j + 1 < order.size() && values[order[j + 1]] == values[order[i]]) ++j;
    const double rank = (static_cast<double>(i + 1) + static_cast<double>(j + 1)) / 2.0;
    for (std::size_t k = i; k <= j; ++k) ranks[order[k]] = rank;
    i = j + 1;
  }
  return ranks;
}

Correlation srocc(std::span<const double> x, std::span<const double> y) {
  check_pair(x, y);
  const auto rx = average_ranks(x);
  const auto ry = average_ranks(y);
  return plcc(rx, ry);
}

double rmse(std::span<const double> x, std::span<const double> y) {
  check_pair(x, y);
  double acc = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) acc += (x[i] - y[i]) * (x[i] - y[i]);
  return std::sqrt(acc / static_cast<double>(x.size()));
}

namespace {

GroupReport raw_report(std::span<const double> pred, std::span<const double> mos) {
  GroupReport r;
  r.n = pred.size();
  const Correlation p = plcc(pred, mos);
  r.plcc = p.value;
  r.degenerate = p.degenerate;
  r.srocc = srocc(pred, mos).value;
  const auto [a, c] = linear_fit(pred, mos);
  std::vector<double> fitted(pred.size());
  for (std::size_t i = 0; i < pred.size(); ++i) fitted[i] = a * pred[i] + c;
  r.rmse = rmse(fitted, mos);
  return r;
}

GroupReport mapped_report(std::span<const double> pred, std::span<const double> mapped,
                          std::span<const double> mos, const LogisticFit& fit) {
  GroupReport r;
  r.n = pred.size();
  const Correlation p = plcc(mapped, mos);
  const Correlation s = srocc(pred, mos);
  r.plcc = p.value;
  r.srocc = s.value;
  r.degenerate = fit.degenerate || p.degenerate || s.degenerate;
  r.rmse = rmse(mapped, mos);
  r.logistic = fit.model.params;
  r.logistic_mapped = true;
  r.linear_fallback = fit.linear_fallback;
  return r;
}

GroupReport fit_report(std::span<const double> pred, std::span<const double> mos) {
  if (pred.size() < 5) return raw_report(pred, mos);
  const LogisticFit fit = logistic_fit(pred, mos);
  return mapped_report(pred, fit.mapped, mos, fit);
}

}  // namespace

EvalReport evaluate(std::span<const Sample> samples, FitScope scope) {
  if (samples.empty()) throw DomainError("no samples to evaluate");
  EvalReport report;
  report.scope = scope;
  std::vector<double> pred(samples.size());
  std::vector<double> mos(samples.size());
  for (std::size_t i = 0; i < samples.size(); ++i) {
    pred[i] = samples[i].prediction;
    mos[i] = samples[i].mos;
  }

  std::optional<LogisticFit> global;
  if (samples.size() >= 5) {
    global = logistic_fit(pred, mos);
    report.all = mapped_report(pred, global->mapped, mos, *global);
  } else {
    report.all = raw_report(pred, mos);
  }

  auto breakdown = [&](auto key_of, std::map<std::string, GroupReport>& out) {
    std::map<std::string, std::vector<std::size_t>> groups;
    for (std::size_t i = 0; i < samples.size(); ++i) groups[key_of(samples[i])].push_back(i);
    for (const auto& [key, members] : groups) {
      if (members.size() < 3) continue;
      std::vector<double> p;
      std::vector<double> m;
      std::vector<double> mapped;
      for (const std::size_t i : members) {
        p.push_back(pred[i]);
        m.push_back(mos[i]);
        if (global) mapped.push_back(global->mapped[i]);
      }
      if (scope == FitScope::PerGroup || !global) {
        out[key] = fit_report(p, m);
      } else {
        out[key] = mapped_report(p, mapped, m, *global);
      }
    }
  };
  breakdown([](const Sample& s) { return s.content; }, report.by_content);
  breakdown([](const Sample& s) { return s.distortion; }, report.by_distortion);
  return report;
}

}  // namespace pcqa::eval
