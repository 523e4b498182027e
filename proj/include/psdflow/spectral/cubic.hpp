#pragma once

#include <array>
#include <complex>

namespace psdflow::spectral {

using cplx = std::complex<double>;

/// Coefficients of c3 x^3 + c2 x^2 + c1 x + c0.
struct Cubic {
  cplx c3, c2, c1, c0;

  cplx operator()(cplx x) const { return ((c3 * x + c2) * x + c1) * x + c0; }
  cplx derivative(cplx x) const { return (3.0 * c3 * x + 2.0 * c2) * x + c1; }
  /// |f(x)| divided by the magnitude of the largest monomial at x.
  double relative_residual(cplx x) const;
};

/// All three roots (with multiplicity). Closed-form Cardano solution followed by Newton
/// polishing; falls back to companion-matrix eigenvalues when the polished residual of any
/// root stays above 1e-12 (near-degenerate roots). Throws ConvergenceError if both fail.
std::array<cplx, 3> cubic_roots(const Cubic& cubic);

/// Discriminant 18abcd - 4b^3 d + b^2 c^2 - 4ac^3 - 27a^2 d^2 of a real cubic.
/// Positive: three distinct real roots. Negative: one real root and a conjugate pair.
double discriminant(double a, double b, double c, double d);

}  // namespace psdflow::spectral
