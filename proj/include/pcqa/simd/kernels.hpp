#pragma once

#include <cstddef>
#include <span>
#include <string_view>

namespace pcqa::simd {

enum class Isa { Scalar, Avx2 };

std::string_view isa_name(Isa isa);

/// Best ISA supported by both this build and the running CPU.
Isa detected_isa();

/// ISA the dispatching kernels currently use. Starts as detected_isa(),
/// unless PCQA_SIMD=scalar is set in the environment.
Isa active_isa();

/// Forces a kernel set; throws std::invalid_argument if `isa` is unavailable.
void set_active_isa(Isa isa);

bool isa_available(Isa isa);

// Every kernel below is elementwise: lane i of the output depends only on
// lane i of the inputs, with the same operation order in every variant, so
// scalar and vector paths produce bit-identical results.

/// out[i] = (xs[i]-qx)^2 + (ys[i]-qy)^2 + (zs[i]-qz)^2
void squared_distances(std::span<const double> xs, std::span<const double> ys,
                       std::span<const double> zs, double qx, double qy, double qz,
                       std::span<double> out);

/// out[i] = sqrt(weights[i]) * (values[i] - center)
void weighted_differences(std::span<const double> weights, std::span<const double> values,
                          double center, std::span<double> out);

/// Row-vector product of a 3x3 matrix with SoA triples:
/// out_k[i] = m[k][0]*a[i] + m[k][1]*b[i] + m[k][2]*c[i]
struct Mat3 {
  double m[3][3];
};
void transform3(const Mat3& m, std::span<const double> a, std::span<const double> b,
                std::span<const double> c, std::span<double> out0, std::span<double> out1,
                std::span<double> out2);

namespace scalar {
void squared_distances(const double* xs, const double* ys, const double* zs, std::size_t n,
                       double qx, double qy, double qz, double* out);
void weighted_differences(const double* weights, const double* values, std::size_t n,
                          double center, double* out);
void transform3(const Mat3& m, const double* a, const double* b, const double* c, std::size_t n,
                double* out0, double* out1, double* out2);
}  // namespace scalar

#if defined(PCQA_HAVE_AVX2)
namespace avx2 {
void squared_distances(const double* xs, const double* ys, const double* zs, std::size_t n,
                       double qx, double qy, double qz, double* out);
void weighted_differences(const double* weights, const double* values, std::size_t n,
                          double center, double* out);
void transform3(const Mat3& m, const double* a, const double* b, const double* c, std::size_t n,
                double* out0, double* out1, double* out2);
}  // namespace avx2
#endif

}  // namespace pcqa::simd
