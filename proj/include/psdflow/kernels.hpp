#pragma once

// Reduction kernels behind the fixed-point solvers. Every kernel has a scalar
// reference implementation and, on x86-64, an AVX2/FMA variant; the active one is
// picked at runtime from CPUID and can be forced with PSDFLOW_SIMD=scalar|avx2.

#include <complex>
#include <span>
#include <string_view>

namespace psdflow::kernels {

enum class Isa { scalar, avx2 };

/// Sums of w_i / (u + a_i) and w_i / (u + a_i)^2.
struct ShiftSums {
  double first = 0.0;
  double second = 0.0;
};

/// Sums of v_i / (c - b_i) and v_i / (c - b_i)^2 with complex v, b given as split arrays.
struct PoleSums {
  std::complex<double> first{};
  std::complex<double> second{};
};

/// Split-storage view of a complex array.
struct ComplexSpan {
  std::span<const double> re;
  std::span<const double> im;
  std::size_t size() const { return re.size(); }
};

bool isa_supported(Isa isa);
Isa active_isa();
/// Throws ValidationError if the ISA is not supported by this CPU/build.
void set_active_isa(Isa isa);
std::string_view isa_name(Isa isa);
/// Parses "scalar" / "avx2"; throws ValidationError otherwise.
Isa parse_isa(std::string_view name);

ShiftSums shift_sums(std::span<const double> w, std::span<const double> a, double u);
/// Sum of w_i b_i / (u + a_i).
double weighted_shift_sum(std::span<const double> w, std::span<const double> b,
                          std::span<const double> a, double u);
PoleSums pole_sums(ComplexSpan v, ComplexSpan b, std::complex<double> c);

namespace scalar {
ShiftSums shift_sums(std::span<const double> w, std::span<const double> a, double u);
double weighted_shift_sum(std::span<const double> w, std::span<const double> b,
                          std::span<const double> a, double u);
PoleSums pole_sums(ComplexSpan v, ComplexSpan b, std::complex<double> c);
}  // namespace scalar

#if defined(PSDFLOW_HAVE_AVX2)
namespace avx2 {
ShiftSums shift_sums(std::span<const double> w, std::span<const double> a, double u);
double weighted_shift_sum(std::span<const double> w, std::span<const double> b,
                          std::span<const double> a, double u);
PoleSums pole_sums(ComplexSpan v, ComplexSpan b, std::complex<double> c);
}  // namespace avx2
#endif

}  // namespace psdflow::kernels
