// Compiled with -mavx2 -mfma; only reached after a CPUID check.
#include <immintrin.h>

#include "psdflow/kernels.hpp"

namespace psdflow::kernels::avx2 {

namespace {
inline double hsum(__m256d v) {
  const __m128d lo = _mm256_castpd256_pd128(v);
  const __m128d hi = _mm256_extractf128_pd(v, 1);
  const __m128d s = _mm_add_pd(lo, hi);
  return _mm_cvtsd_f64(_mm_add_sd(s, _mm_unpackhi_pd(s, s)));
}
}  // namespace

ShiftSums shift_sums(std::span<const double> w, std::span<const double> a, double u) {
  const std::size_t n = w.size();
  const std::size_t n4 = n & ~std::size_t{3};
  const __m256d uu = _mm256_set1_pd(u);
  const __m256d one = _mm256_set1_pd(1.0);
  __m256d acc1 = _mm256_setzero_pd();
  __m256d acc2 = _mm256_setzero_pd();
  for (std::size_t i = 0; i < n4; i += 4) {
    const __m256d inv = _mm256_div_pd(one, _mm256_add_pd(uu, _mm256_loadu_pd(a.data() + i)));
    const __m256d t = _mm256_mul_pd(_mm256_loadu_pd(w.data() + i), inv);
    acc1 = _mm256_add_pd(acc1, t);
    acc2 = _mm256_fmadd_pd(t, inv, acc2);
  }
  ShiftSums s{hsum(acc1), hsum(acc2)};
  for (std::size_t i = n4; i < n; ++i) {
    const double inv = 1.0 / (u + a[i]);
    const double t = w[i] * inv;
    s.first += t;
    s.second += t * inv;
  }
  return s;
}

double weighted_shift_sum(std::span<const double> w, std::span<const double> b,
                          std::span<const double> a, double u) {
  const std::size_t n = w.size();
  const std::size_t n4 = n & ~std::size_t{3};
  const __m256d uu = _mm256_set1_pd(u);
  __m256d acc = _mm256_setzero_pd();
  for (std::size_t i = 0; i < n4; i += 4) {
    const __m256d num = _mm256_mul_pd(_mm256_loadu_pd(w.data() + i), _mm256_loadu_pd(b.data() + i));
    acc = _mm256_add_pd(acc, _mm256_div_pd(num, _mm256_add_pd(uu, _mm256_loadu_pd(a.data() + i))));
  }
  double s = hsum(acc);
  for (std::size_t i = n4; i < n; ++i) s += w[i] * b[i] / (u + a[i]);
  return s;
}

PoleSums pole_sums(ComplexSpan v, ComplexSpan b, std::complex<double> c) {
  const std::size_t n = v.size();
  const std::size_t n4 = n & ~std::size_t{3};
  const __m256d cr = _mm256_set1_pd(c.real());
  const __m256d ci = _mm256_set1_pd(c.imag());
  const __m256d one = _mm256_set1_pd(1.0);
  __m256d s1r = _mm256_setzero_pd(), s1i = _mm256_setzero_pd();
  __m256d s2r = _mm256_setzero_pd(), s2i = _mm256_setzero_pd();
  for (std::size_t i = 0; i < n4; i += 4) {
    const __m256d dr = _mm256_sub_pd(cr, _mm256_loadu_pd(b.re.data() + i));
    const __m256d di = _mm256_sub_pd(ci, _mm256_loadu_pd(b.im.data() + i));
    const __m256d inv_den = _mm256_div_pd(one, _mm256_fmadd_pd(dr, dr, _mm256_mul_pd(di, di)));
    const __m256d vr = _mm256_loadu_pd(v.re.data() + i);
    const __m256d vi = _mm256_loadu_pd(v.im.data() + i);
    const __m256d qr = _mm256_mul_pd(_mm256_fmadd_pd(vr, dr, _mm256_mul_pd(vi, di)), inv_den);
    const __m256d qi = _mm256_mul_pd(_mm256_fmsub_pd(vi, dr, _mm256_mul_pd(vr, di)), inv_den);
    s1r = _mm256_add_pd(s1r, qr);
    s1i = _mm256_add_pd(s1i, qi);
    s2r = _mm256_fmadd_pd(_mm256_fmadd_pd(qr, dr, _mm256_mul_pd(qi, di)), inv_den, s2r);
    s2i = _mm256_fmadd_pd(_mm256_fmsub_pd(qi, dr, _mm256_mul_pd(qr, di)), inv_den, s2i);
  }
  PoleSums out{{hsum(s1r), hsum(s1i)}, {hsum(s2r), hsum(s2i)}};
  if (n4 < n) {
    const ComplexSpan vt{v.re.subspan(n4), v.im.subspan(n4)};
    const ComplexSpan bt{b.re.subspan(n4), b.im.subspan(n4)};
    const PoleSums tail = scalar::pole_sums(vt, bt, c);
    out.first += tail.first;
    out.second += tail.second;
  }
  return out;
}

}  // namespace psdflow::kernels::avx2
