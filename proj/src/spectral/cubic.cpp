#include "psdflow/spectral/cubic.hpp"

#include <Eigen/Eigenvalues>
#include <algorithm>
#include <cmath>

#include "psdflow/errors.hpp"

namespace psdflow::spectral {

double Cubic::relative_residual(cplx x) const {
  const double scale = std::abs(c3 * x * x * x) + std::abs(c2 * x * x) + std::abs(c1 * x) +
                       std::abs(c0);
  if (scale == 0.0) return 0.0;
  return std::abs((*this)(x)) / scale;
}

namespace {

constexpr double kPolishTarget = 1e-12;

cplx principal_cbrt(cplx v) {
  if (v == cplx(0.0, 0.0)) return v;
  return std::polar(std::cbrt(std::abs(v)), std::arg(v) / 3.0);
}

void polish(const Cubic& f, cplx& x) {
  for (int it = 0; it < 4; ++it) {
    const cplx fx = f(x);
    const cplx dfx = f.derivative(x);
    if (std::abs(dfx) == 0.0) return;
    const cplx next = x - fx / dfx;
    if (!(std::isfinite(next.real()) && std::isfinite(next.imag()))) return;
    if (f.relative_residual(next) >= f.relative_residual(x)) return;
    x = next;
  }
}

std::array<cplx, 3> cardano(const Cubic& f) {
  const cplx b = f.c2 / f.c3;
  const cplx c = f.c1 / f.c3;
  const cplx d = f.c0 / f.c3;
  // x = y - b/3 gives y^3 + p y + q = 0.
  const cplx p = c - b * b / 3.0;
  const cplx q = 2.0 * b * b * b / 27.0 - b * c / 3.0 + d;
  const cplx s = std::sqrt(q * q / 4.0 + p * p * p / 27.0);
  // Larger-magnitude branch avoids cancellation.
  cplx u3 = -q / 2.0 + s;
  const cplx alt = -q / 2.0 - s;
  if (std::abs(alt) > std::abs(u3)) u3 = alt;
  const cplx u = principal_cbrt(u3);
  const cplx omega(-0.5, std::sqrt(3.0) / 2.0);
  std::array<cplx, 3> roots;
  cplx rot(1.0, 0.0);
  for (auto& r : roots) {
    const cplx uk = u * rot;
    const cplx y = (uk == cplx(0.0, 0.0)) ? cplx(0.0, 0.0) : uk - p / (3.0 * uk);
    r = y - b / 3.0;
    rot *= omega;
  }
  return roots;
}

std::array<cplx, 3> companion(const Cubic& f) {
  Eigen::Matrix3cd m = Eigen::Matrix3cd::Zero();
  m(0, 0) = -f.c2 / f.c3;
  m(0, 1) = -f.c1 / f.c3;
  m(0, 2) = -f.c0 / f.c3;
  m(1, 0) = 1.0;
  m(2, 1) = 1.0;
  Eigen::ComplexEigenSolver<Eigen::Matrix3cd> solver(m, false);
  if (solver.info() != Eigen::Success) throw ConvergenceError("companion eigen-solve failed");
  const auto& ev = solver.eigenvalues();
  return {ev(0), ev(1), ev(2)};
}

double worst_residual(const Cubic& f, const std::array<cplx, 3>& roots) {
  double worst = 0.0;
  for (const auto& r : roots) {
    const double res = f.relative_residual(r);
    if (!std::isfinite(res)) return HUGE_VAL;
    worst = std::max(worst, res);
  }
  return worst;
}

}  // namespace

std::array<cplx, 3> cubic_roots(const Cubic& cubic) {
  if (cubic.c3 == cplx(0.0, 0.0)) throw ConvergenceError("leading cubic coefficient is zero");
  auto roots = cardano(cubic);
  for (auto& r : roots) polish(cubic, r);
  if (worst_residual(cubic, roots) <= kPolishTarget) return roots;

  auto fallback = companion(cubic);
  for (auto& r : fallback) polish(cubic, r);
  const double res_fallback = worst_residual(cubic, fallback);
  const double res_cardano = worst_residual(cubic, roots);
  const auto& best = res_fallback < res_cardano ? fallback : roots;
  if (std::min(res_fallback, res_cardano) > 1e-8) {
    throw ConvergenceError("cubic roots not resolved (residual " +
                           std::to_string(std::min(res_fallback, res_cardano)) + ")");
  }
  return best;
}

double discriminant(double a, double b, double c, double d) {
  return 18.0 * a * b * c * d - 4.0 * b * b * b * d + b * b * c * c - 4.0 * a * c * c * c -
         27.0 * a * a * d * d;
}

}  // namespace psdflow::spectral
