#pragma once

#include <cstddef>
#include <string_view>
#include <vector>

#include "pcqa/point_cloud.hpp"
#include "pcqa/spatial_index.hpp"

namespace pcqa::baselines {

struct NormalEstimate {
  std::vector<Vec3> normals;
  /// Points whose neighborhood had rank < 2 and fell back to +z.
  std::vector<std::size_t> degenerate;
};

/// PCA normals from the k nearest neighbors (the point included), oriented
/// toward +z, then +y, then +x on ties.
NormalEstimate estimate_normals(const PointCloud& cloud, const spatial::KdTree& index,
                                std::size_t k = 12);

enum class ErrorMode { Point, Plane };
enum class Aggregation { Mse, Hausdorff };

struct DirectionalError {
  double forward = 0.0;   // distorted points against the reference
  double backward = 0.0;  // reference points against the distorted cloud
  /// The worse direction.
  double symmetric() const { return forward > backward ? forward : backward; }
};

/// Squared point-to-point or point-to-plane errors, averaged or maximized,
/// in both matching directions. Plane mode projects onto the normals of the
/// cloud being searched (taken from the cloud or estimated with `normal_k`).
DirectionalError p2_errors(const PointCloud& ref, const PointCloud& dist, ErrorMode mode,
                           Aggregation agg, std::size_t normal_k = 12);

/// 10 log10(3 p^2 / error) with p the largest bounding-box extent; +inf for
/// a zero error.
double geometry_psnr(double error, const BoundingBox& bbox);

/// (6 Y + U + V) / 8.
double combine_yuv_psnr(double psnr_y, double psnr_u, double psnr_v);

struct YuvPsnr {
  double y = 0.0;
  double u = 0.0;
  double v = 0.0;
  double combined = 0.0;
};

/// Color PSNR of nearest-neighbor matched points in 8-bit BT.709 YUV; the
/// direction with the lower combined value is reported.
YuvPsnr psnr_yuv(const PointCloud& ref, const PointCloud& dist);

enum class Metric { MP2Point, MP2Plane, HP2Point, HP2Plane, PsnrYuv };

std::string_view metric_name(Metric metric);
Metric parse_metric(std::string_view name);
inline constexpr Metric kAllMetrics[] = {Metric::MP2Point, Metric::MP2Plane, Metric::HP2Point,
                                         Metric::HP2Plane, Metric::PsnrYuv};

struct BaselineResult {
  Metric metric = Metric::MP2Point;
  double value = 0.0;      // PSNR in dB (+inf for zero error)
  double raw_error = 0.0;  // symmetric squared error; NaN for PSNR_YUV
  bool symmetric = true;
};

BaselineResult compute(Metric metric, const PointCloud& ref, const PointCloud& dist,
                       std::size_t normal_k = 12);

}  // namespace pcqa::baselines
