#include <cmath>

#include "pcqa/simd/kernels.hpp"

namespace pcqa::simd::scalar {

void squared_distances(const double* xs, const double* ys, const double* zs, std::size_t n,
                       double qx, double qy, double qz, double* out) {
  for (std::size_t i = 0; i < n; ++i) {
    const double dx = xs[i] - qx;
    const double dy = ys[i] - qy;
    const double dz = zs[i] - qz;
    out[i] = dx * dx + dy * dy + dz * dz;
  }
}

void weighted_differences(const double* weights, const double* values, std::size_t n,
                          double center, double* out) {
  for (std::size_t i = 0; i < n; ++i) {
    out[i] = std::sqrt(weights[i]) * (values[i] - center);
  }
}

void transform3(const Mat3& m, const double* a, const double* b, const double* c, std::size_t n,
                double* out0, double* out1, double* out2) {
  for (std::size_t i = 0; i < n; ++i) {
    out0[i] = m.m[0][0] * a[i] + m.m[0][1] * b[i] + m.m[0][2] * c[i];
    out1[i] = m.m[1][0] * a[i] + m.m[1][1] * b[i] + m.m[1][2] * c[i];
    out2[i] = m.m[2][0] * a[i] + m.m[2][1] * b[i] + m.m[2][2] * c[i];
  }
}

}  // namespace pcqa::simd::scalar
