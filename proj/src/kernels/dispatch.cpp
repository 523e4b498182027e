#include <atomic>
#include <cstdlib>
#include <string>

#include "psdflow/errors.hpp"
#include "psdflow/kernels.hpp"

namespace psdflow::kernels {

namespace {

Isa detect() {
  if (const char* env = std::getenv("PSDFLOW_SIMD")) {
    const std::string_view name(env);
    if (name == "scalar") return Isa::scalar;
    if (name == "avx2" && isa_supported(Isa::avx2)) return Isa::avx2;
  }
  return isa_supported(Isa::avx2) ? Isa::avx2 : Isa::scalar;
}

std::atomic<Isa>& active() {
  static std::atomic<Isa> isa{detect()};
  return isa;
}

}  // namespace

bool isa_supported(Isa isa) {
  switch (isa) {
    case Isa::scalar:
      return true;
    case Isa::avx2:
#if defined(PSDFLOW_HAVE_AVX2)
      return __builtin_cpu_supports("avx2") && __builtin_cpu_supports("fma");
#else
      return false;
#endif
  }
  return false;
}

Isa active_isa() { return active().load(std::memory_order_relaxed); }

void set_active_isa(Isa isa) {
  if (!isa_supported(isa)) {
    throw ValidationError("instruction set '" + std::string(isa_name(isa)) +
                          "' is not available on this machine");
  }
  active().store(isa, std::memory_order_relaxed);
}

std::string_view isa_name(Isa isa) { return isa == Isa::avx2 ? "avx2" : "scalar"; }

Isa parse_isa(std::string_view name) {
  if (name == "scalar") return Isa::scalar;
  if (name == "avx2") return Isa::avx2;
  throw ValidationError("unknown instruction set '" + std::string(name) + "'");
}

ShiftSums shift_sums(std::span<const double> w, std::span<const double> a, double u) {
#if defined(PSDFLOW_HAVE_AVX2)
  if (active_isa() == Isa::avx2) return avx2::shift_sums(w, a, u);
#endif
  return scalar::shift_sums(w, a, u);
}

double weighted_shift_sum(std::span<const double> w, std::span<const double> b,
                          std::span<const double> a, double u) {
#if defined(PSDFLOW_HAVE_AVX2)
  if (active_isa() == Isa::avx2) return avx2::weighted_shift_sum(w, b, a, u);
#endif
  return scalar::weighted_shift_sum(w, b, a, u);
}

PoleSums pole_sums(ComplexSpan v, ComplexSpan b, std::complex<double> c) {
#if defined(PSDFLOW_HAVE_AVX2)
  if (active_isa() == Isa::avx2) return avx2::pole_sums(v, b, c);
#endif
  return scalar::pole_sums(v, b, c);
}

}  // namespace psdflow::kernels
