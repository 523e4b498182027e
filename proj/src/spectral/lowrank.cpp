#include "psdflow/spectral/lowrank.hpp"

#include <algorithm>
#include <cmath>
#include <string>
#include <vector>

#include "psdflow/errors.hpp"
#include "psdflow/spectral/stieltjes.hpp"

namespace psdflow::spectral {

LowRankQ1 lowrank_Q1(double lambda) {
  if (!(lambda > 0.0) || !std::isfinite(lambda)) throw ValidationError("lambda must be > 0");
  const double nonzero = 1.0 - 1.0 / lambda;
  LowRankQ1 out;
  out.roots = {std::min(0.0, nonzero), std::max(0.0, nonzero)};
  out.physical = std::max(0.0, nonzero);
  return out;
}

namespace {

std::vector<cplx> quadratic_roots(double lambda, cplx z) {
  const cplx a = z - 1.0;
  const cplx b = -(z - 2.0 + 1.0 / lambda);
  const cplx c = -1.0;
  cplx s = std::sqrt(b * b - 4.0 * a * c);
  if ((std::conj(b) * s).real() < 0.0) s = -s;
  const cplx q = -0.5 * (b + s);
  return {q / a, c / q};
}

}  // namespace

LowRankQhat lowrank_Qhat(double lambda, cplx z) {
  if (!(lambda > 0.0) || !std::isfinite(lambda)) throw ValidationError("lambda must be > 0");
  if (z == cplx(1.0, 0.0)) throw PoleAtOne("Qhat has a pole at z = 1; use lowrank_Q1");
  if (z.imag() < 0.0) {
    auto up = lowrank_Qhat(lambda, std::conj(z));
    return {std::conj(up.q_hat), std::conj(up.calQ)};
  }
  const auto roots_of = [lambda](cplx w) { return quadratic_roots(lambda, w); };
  cplx pick;
  if (z.imag() == 0.0) {
    const auto r = quadratic_roots(lambda, z);
    if (std::abs(r[0].imag()) > 1e-14 * std::abs(r[0])) {
      pick = r[0].imag() > 0.0 ? r[0] : r[1];
    } else {
      pick = track_branch(roots_of, z);
    }
  } else {
    pick = track_branch(roots_of, z);
    if (pick.imag() < -1e-11 * (1.0 + std::abs(pick))) {
      throw NoHerglotzRoot("Qhat root in lower half-plane at z = (" + std::to_string(z.real()) +
                           ", " + std::to_string(z.imag()) + ")");
    }
  }
  return {pick, (1.0 - z) * pick};
}

}  // namespace psdflow::spectral
