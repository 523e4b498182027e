#pragma once

// Overflow-safe pieces of the flow integrands. Every exponential is evaluated with a
// non-positive real part of its argument, switching form on the sign of Re x.

#include <cmath>
#include <complex>

namespace psdflow::flow::detail {

using cplx = std::complex<double>;

inline cplx expm1(cplx w) {
  if (std::abs(w) < 0.1) {
    cplx term = w;
    cplx sum = w;
    for (int k = 2; k < 20; ++k) {
      term *= w / double(k);
      sum += term;
      if (std::abs(term) <= 1e-17 * std::abs(sum)) break;
    }
    return sum;
  }
  return std::exp(w) - 1.0;
}

inline double expm1(double w) { return std::expm1(w); }

/// 1/L(x) and K(x) = e^{2tx}/L(x) with L(x) = (e^{2tx} - 1)/x, for t > 0.
struct ResultOneTerms {
  double inv_l;
  double k;
};

inline ResultOneTerms result_one_terms(double x, double t) {
  if (x == 0.0) return {1.0 / (2.0 * t), 1.0 / (2.0 * t)};
  if (x > 0.0) {
    const double m = -std::expm1(-2.0 * t * x);
    const double k = x / m;
    return {k * std::exp(-2.0 * t * x), k};
  }
  const double em = std::expm1(2.0 * t * x);
  return {x / em, x * std::exp(2.0 * t * x) / em};
}

/// With T(x) = e^{2tx} - z L(x): 1/T = alpha/(beta - z gamma) and L/T = gamma/(beta - z gamma).
template <class X>
struct HTerms {
  X alpha, beta, gamma;
};

template <class X>
HTerms<X> h_terms(X x, double t) {
  if (std::real(x) > 0.0) {
    const X e = std::exp(-2.0 * t * x);
    const X m = -expm1(-2.0 * t * x);
    return {e * x, x, m};
  }
  const X d = std::exp(2.0 * t * x);
  const X l = (x == X(0.0)) ? X(2.0 * t) : X(expm1(2.0 * t * x) / x);
  return {X(1.0), d, l};
}

}  // namespace psdflow::flow::detail
