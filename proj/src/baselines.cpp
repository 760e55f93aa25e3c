#include "pcqa/baselines.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <optional>
#include <stdexcept>
#include <string>

#include <Eigen/Eigenvalues>

#include "pcqa/color.hpp"
#include "pcqa/error.hpp"

namespace pcqa::baselines {

NormalEstimate estimate_normals(const PointCloud& cloud, const spatial::KdTree& index, std::size_t k) {
  if (k < 3) throw DomainError("normal estimation needs k >= 3");
  if (cloud.size() < k) {
    throw DomainError("normal estimation needs at least k = " + std::to_string(k) + " points");
  }
  NormalEstimate out;
  out.normals.resize(cloud.size());
  for (std::size_t i = 0; i < cloud.size(); ++i) {
    const auto found = index.knn(cloud.position(i), k);
    Vec3 mean = Vec3::Zero();
    for (const auto& n : found) mean += cloud.position(n.index);
    mean /= static_cast<double>(found.size());
    Eigen::Matrix3d cov = Eigen::Matrix3d::Zero();
    for (const auto& n : found) {
      const Vec3 d = cloud.position(n.index) - mean;
      cov += d * d.transpose();
    }
    cov /= static_cast<double>(found.size());

    const Eigen::SelfAdjointEigenSolver<Eigen::Matrix3d> solver(cov);
    const Vec3 lambda = solver.eigenvalues();  // ascending
    if (solver.info() != Eigen::Success || !(lambda[2] > 0.0) || lambda[1] <= 1e-12 * lambda[2]) {
      out.normals[i] = Vec3::UnitZ();
      out.degenerate.push_back(i);
      continue;
    }
    Vec3 normal = solver.eigenvectors().col(0).normalized();
    constexpr double kTie = 1e-12;
    bool flip = false;
    if (std::abs(normal.z()) > kTie) {
      flip = normal.z() < 0.0;
    } else if (std::abs(normal.y()) > kTie) {
      flip = normal.y() < 0.0;
    } else {
      flip = normal.x() < 0.0;
    }
    out.normals[i] = flip ? Vec3(-normal) : normal;
  }
  return out;
}

namespace {

std::vector<Vec3> normals_of(const PointCloud& cloud, const spatial::KdTree& index, std::size_t k) {
  if (cloud.has_normals()) return {cloud.normals().begin(), cloud.normals().end()};
  return estimate_normals(cloud, index, std::clamp<std::size_t>(k, 3, std::max<std::size_t>(cloud.size(), 3))).normals;
}

// Squared errors of `from` points against their nearest `to` point.
double directional_error(const PointCloud& from, const PointCloud& to, const spatial::KdTree& to_index,
                         const std::vector<Vec3>* to_normals, Aggregation agg) {
  double acc = 0.0;
  for (std::size_t i = 0; i < from.size(); ++i) {
    const auto nearest = to_index.nearest(from.position(i));
    const Vec3 e = from.position(i) - to.position(nearest.index);
    double err = e.squaredNorm();
    if (to_normals != nullptr) {
      const double projected = e.dot((*to_normals)[nearest.index]);
      err = projected * projected;
    }
    acc = agg == Aggregation::Mse ? acc + err : std::max(acc, err);
  }
  return agg == Aggregation::Mse ? acc / static_cast<double>(from.size()) : acc;
}

}  // namespace

DirectionalError p2_errors(const PointCloud& ref, const PointCloud& dist, ErrorMode mode,
                           Aggregation agg, std::size_t normal_k) {
  if (ref.empty() || dist.empty()) throw DomainError("geometric error needs two non-empty clouds");
  const spatial::KdTree ref_index(ref);
  const spatial::KdTree dist_index(dist);
  std::optional<std::vector<Vec3>> ref_normals;
  std::optional<std::vector<Vec3>> dist_normals;
  if (mode == ErrorMode::Plane) {
    if (ref.size() < 3 || dist.size() < 3) throw DomainError("point-to-plane error needs at least 3 points per cloud");
    ref_normals = normals_of(ref, ref_index, normal_k);
    dist_normals = normals_of(dist, dist_index, normal_k);
  }
  DirectionalError out;
  out.forward = directional_error(dist, ref, ref_index, ref_normals ? &*ref_normals : nullptr, agg);
  out.backward = directional_error(ref, dist, dist_index, dist_normals ? &*dist_normals : nullptr, agg);
  return out;
}

double geometry_psnr(double error, const BoundingBox& bbox) {
  if (error < 0.0) throw DomainError("error must be non-negative");
  if (error == 0.0) return std::numeric_limits<double>::infinity();
  const double p = bbox.max_extent();
  return 10.0 * std::log10(3.0 * p * p / error);
}

double combine_yuv_psnr(double psnr_y, double psnr_u, double psnr_v) {
  return (6.0 * psnr_y + psnr_u + psnr_v) / 8.0;
}

namespace {

YuvPsnr directional_yuv(const PointCloud& from, const PointCloud& to, const spatial::KdTree& to_index) {
  Vec3 sse = Vec3::Zero();
  for (std::size_t i = 0; i < from.size(); ++i) {
    const auto nearest = to_index.nearest(from.position(i));
    const Vec3 a = color::to_yuv(color::normalized(from.color(i))) * 255.0;
    const Vec3 b = color::to_yuv(color::normalized(to.color(nearest.index))) * 255.0;
    sse += (a - b).cwiseAbs2();
  }
  const Vec3 mse = sse / static_cast<double>(from.size());
  auto psnr = [](double m) {
    return m == 0.0 ? std::numeric_limits<double>::infinity() : 10.0 * std::log10(255.0 * 255.0 / m);
  };
  YuvPsnr out{psnr(mse[0]), psnr(mse[1]), psnr(mse[2]), 0.0};
  out.combined = combine_yuv_psnr(out.y, out.u, out.v);
  return out;
}

}  // namespace

YuvPsnr psnr_yuv(const PointCloud& ref, const PointCloud& dist) {
  if (!ref.has_colors() || !dist.has_colors()) throw DomainError("PSNR_YUV needs colors on both clouds");
  if (ref.empty() || dist.empty()) throw DomainError("PSNR_YUV needs two non-empty clouds");
  const spatial::KdTree ref_index(ref);
  const spatial::KdTree dist_index(dist);
  const YuvPsnr forward = directional_yuv(dist, ref, ref_index);
  const YuvPsnr backward = directional_yuv(ref, dist, dist_index);
  return backward.combined < forward.combined ? backward : forward;
}

std::string_view metric_name(Metric metric) {
  switch (metric) {
    case Metric::MP2Point:
      return "m-p2po";
    case Metric::MP2Plane:
      return "m-p2pl";
    case Metric::HP2Point:
      return "h-p2po";
    case Metric::HP2Plane:
      return "h-p2pl";
    case Metric::PsnrYuv:
      return "psnr-yuv";
  }
  return "unknown";
}

Metric parse_metric(std::string_view name) {
  for (const Metric m : kAllMetrics) {
    if (metric_name(m) == name) return m;
  }
  throw std::invalid_argument("unknown metric '" + std::string(name) + "'");
}

BaselineResult compute(Metric metric, const PointCloud& ref, const PointCloud& dist, std::size_t normal_k) {
  BaselineResult out;
  out.metric = metric;
  if (metric == Metric::PsnrYuv) {
    out.value = psnr_yuv(ref, dist).combined;
    out.raw_error = std::numeric_limits<double>::quiet_NaN();
    return out;
  }
  const bool plane = metric == Metric::MP2Plane || metric == Metric::HP2Plane;
  const bool mse = metric == Metric::MP2Point || metric == Metric::MP2Plane;
  out.raw_error = p2_errors(ref, dist, plane ? ErrorMode::Plane : ErrorMode::Point,
                            mse ? Aggregation::Mse : Aggregation::Hausdorff, normal_k)
                      .symmetric();
  out.value = geometry_psnr(out.raw_error, bounding_box(ref));
  return out;
}

}  // namespace pcqa::baselines
