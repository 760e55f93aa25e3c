#include <immintrin.h>

#include "pcqa/simd/kernels.hpp"

// Compiled with -mavx2 only (no -mfma): mul and add stay separate
// instructions, matching the scalar rounding sequence.

namespace pcqa::simd::avx2 {

void squared_distances(const double* xs, const double* ys, const double* zs, std::size_t n,
                       double qx, double qy, double qz, double* out) {
  const __m256d vqx = _mm256_set1_pd(qx);
  const __m256d vqy = _mm256_set1_pd(qy);
  const __m256d vqz = _mm256_set1_pd(qz);
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    const __m256d dx = _mm256_sub_pd(_mm256_loadu_pd(xs + i), vqx);
    const __m256d dy = _mm256_sub_pd(_mm256_loadu_pd(ys + i), vqy);
    const __m256d dz = _mm256_sub_pd(_mm256_loadu_pd(zs + i), vqz);
    __m256d acc = _mm256_mul_pd(dx, dx);
    acc = _mm256_add_pd(acc, _mm256_mul_pd(dy, dy));
    acc = _mm256_add_pd(acc, _mm256_mul_pd(dz, dz));
    _mm256_storeu_pd(out + i, acc);
  }
  scalar::squared_distances(xs + i, ys + i, zs + i, n - i, qx, qy, qz, out + i);
}

void weighted_differences(const double* weights, const double* values, std::size_t n,
                          double center, double* out) {
  const __m256d vc = _mm256_set1_pd(center);
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    const __m256d w = _mm256_sqrt_pd(_mm256_loadu_pd(weights + i));
    const __m256d d = _mm256_sub_pd(_mm256_loadu_pd(values + i), vc);
    _mm256_storeu_pd(out + i, _mm256_mul_pd(w, d));
  }
  scalar::weighted_differences(weights + i, values + i, n - i, center, out + i);
}

namespace {

inline __m256d row(const double* r, __m256d a, __m256d b, __m256d c) {
  __m256d acc = _mm256_mul_pd(_mm256_set1_pd(r[0]), a);
  acc = _mm256_add_pd(acc, _mm256_mul_pd(_mm256_set1_pd(r[1]), b));
  return _mm256_add_pd(acc, _mm256_mul_pd(_mm256_set1_pd(r[2]), c));
}

}  // namespace

void transform3(const Mat3& m, const double* a, const double* b, const double* c, std::size_t n,
                double* out0, double* out1, double* out2) {
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    const __m256d va = _mm256_loadu_pd(a + i);
    const __m256d vb = _mm256_loadu_pd(b + i);
    const __m256d vc = _mm256_loadu_pd(c + i);
    _mm256_storeu_pd(out0 + i, row(m.m[0], va, vb, vc));
    _mm256_storeu_pd(out1 + i, row(m.m[1], va, vb, vc));
    _mm256_storeu_pd(out2 + i, row(m.m[2], va, vb, vc));
  }
  scalar::transform3(m, a + i, b + i, c + i, n - i, out0 + i, out1 + i, out2 + i);
}

}  // namespace pcqa::simd::avx2
