#include <atomic>
#include <cassert>
#include <cstdlib>
#include <stdexcept>
#include <string>

#include "pcqa/simd/kernels.hpp"

namespace pcqa::simd {

namespace {

Isa initial_isa() {
  if (const char* env = std::getenv("PCQA_SIMD"); env != nullptr && std::string(env) == "scalar") {
    return Isa::Scalar;
  }
  return detected_isa();
}

std::atomic<Isa>& active() {
  static std::atomic<Isa> isa{initial_isa()};
  return isa;
}

}  // namespace

std::string_view isa_name(Isa isa) {
  switch (isa) {
    case Isa::Scalar:
      return "scalar";
    case Isa::Avx2:
      return "avx2";
  }
  return "unknown";
}

bool isa_available(Isa isa) {
  switch (isa) {
    case Isa::Scalar:
      return true;
    case Isa::Avx2:
#if defined(PCQA_HAVE_AVX2) && (defined(__GNUC__) || defined(__clang__))
      return __builtin_cpu_supports("avx2");
#else
      return false;
#endif
  }
  return false;
}

Isa detected_isa() { return isa_available(Isa::Avx2) ? Isa::Avx2 : Isa::Scalar; }

Isa active_isa() { return active().load(std::memory_order_relaxed); }

void set_active_isa(Isa isa) {
  if (!isa_available(isa)) {
    throw std::invalid_argument("SIMD kernel set not available: " + std::string(isa_name(isa)));
  }
  active().store(isa, std::memory_order_relaxed);
}

void squared_distances(std::span<const double> xs, std::span<const double> ys,
                       std::span<const double> zs, double qx, double qy, double qz,
                       std::span<double> out) {
  assert(ys.size() == xs.size() && zs.size() == xs.size() && out.size() >= xs.size());
#if defined(PCQA_HAVE_AVX2)
  if (active_isa() == Isa::Avx2) {
    avx2::squared_distances(xs.data(), ys.data(), zs.data(), xs.size(), qx, qy, qz, out.data());
    return;
  }
#endif
  scalar::squared_distances(xs.data(), ys.data(), zs.data(), xs.size(), qx, qy, qz, out.data());
}

void weighted_differences(std::span<const double> weights, std::span<const double> values,
                          double center, std::span<double> out) {
  assert(values.size() == weights.size() && out.size() >= weights.size());
#if defined(PCQA_HAVE_AVX2)
  if (active_isa() == Isa::Avx2) {
    avx2::weighted_differences(weights.data(), values.data(), weights.size(), center, out.data());
    return;
  }
#endif
  scalar::weighted_differences(weights.data(), values.data(), weights.size(), center, out.data());
}

void transform3(const Mat3& m, std::span<const double> a, std::span<const double> b,
                std::span<const double> c, std::span<double> out0, std::span<double> out1,
                std::span<double> out2) {
  const std::size_t n = a.size();
  assert(b.size() == n && c.size() == n);
  assert(out0.size() >= n && out1.size() >= n && out2.size() >= n);
#if defined(PCQA_HAVE_AVX2)
  if (active_isa() == Isa::Avx2) {
    avx2::transform3(m, a.data(), b.data(), c.data(), n, out0.data(), out1.data(), out2.data());
    return;
  }
#endif
  scalar::transform3(m, a.data(), b.data(), c.data(), n, out0.data(), out1.data(), out2.data());
}

}  // namespace pcqa::simd
