#pragma once

#include <cmath>
#include <complex>

namespace oracle {

using cplx = std::complex<double>;

// Stieltjes transform of W = (1/n) G G^T, G p x n standard Gaussian, y = p/n:
// y z m^2 + (z + y - 1) m + 1 = 0, root with Im m > 0 for Im z > 0.
inline cplx mp_stieltjes(double y, cplx z) {
  const cplx a = y * z;
  const cplx b = z + y - 1.0;
  const cplx s = std::sqrt(b * b - 4.0 * a);
  const cplx r1 = (-b + s) / (2.0 * a);
  const cplx r2 = (-b - s) / (2.0 * a);
  if (z.imag() > 0.0) return r1.imag() > r2.imag() ? r1 : r2;
  // real z off the support: the root that decays like -1/z
  return std::abs(r1 * z + 1.0) < std::abs(r2 * z + 1.0) ? r1 : r2;
}

// (1/n) Tr (X X^T - z)^{-1} for X n x k with entries of variance 1/n, c = k/n.
inline cplx gram_stieltjes(double c, cplx z) {
  return c * mp_stieltjes(c, z) - (1.0 - c) / z;
}

}  // namespace oracle
