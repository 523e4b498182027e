#include "psdflow/kernels.hpp"

namespace psdflow::kernels::scalar {

ShiftSums shift_sums(std::span<const double> w, std::span<const double> a, double u) {
  ShiftSums s;
  for (std::size_t i = 0; i < w.size(); ++i) {
    const double inv = 1.0 / (u + a[i]);
    const double t = w[i] * inv;
    s.first += t;
    s.second += t * inv;
  }
  return s;
}

double weighted_shift_sum(std::span<const double> w, std::span<const double> b,
                          std::span<const double> a, double u) {
  double s = 0.0;
  for (std::size_t i = 0; i < w.size(); ++i) s += w[i] * b[i] / (u + a[i]);
  return s;
}

PoleSums pole_sums(ComplexSpan v, ComplexSpan b, std::complex<double> c) {
  double s1r = 0.0, s1i = 0.0, s2r = 0.0, s2i = 0.0;
  const double cr = c.real(), ci = c.imag();
  for (std::size_t i = 0; i < v.size(); ++i) {
    const double dr = cr - b.re[i];
    const double di = ci - b.im[i];
    const double inv_den = 1.0 / (dr * dr + di * di);
    // q = v / d
    const double qr = (v.re[i] * dr + v.im[i] * di) * inv_den;
    const double qi = (v.im[i] * dr - v.re[i] * di) * inv_den;
    s1r += qr;
    s1i += qi;
    // q / d
    s2r += (qr * dr + qi * di) * inv_den;
    s2i += (qi * dr - qr * di) * inv_den;
  }
  return {{s1r, s1i}, {s2r, s2i}};
}

}  // namespace psdflow::kernels::scalar
