#include "psdflow/spectral/edges.hpp"

#include <Eigen/Eigenvalues>
#include <algorithm>
#include <cmath>
#include <string>

#include "psdflow/errors.hpp"
#include "psdflow/spectral/stieltjes.hpp"

namespace psdflow::spectral {

namespace {

using Poly = std::vector<double>;  // ascending coefficients

Poly mul(const Poly& a, const Poly& b) {
  Poly out(a.size() + b.size() - 1, 0.0);
  for (std::size_t i = 0; i < a.size(); ++i)
    for (std::size_t j = 0; j < b.size(); ++j) out[i + j] += a[i] * b[j];
  return out;
}

Poly add(Poly a, const Poly& b, double scale) {
  if (a.size() < b.size()) a.resize(b.size(), 0.0);
  for (std::size_t i = 0; i < b.size(); ++i) a[i] += scale * b[i];
  return a;
}

double eval_derivative(const std::array<double, 5>& p, double z) {
  double v = 0.0;
  for (int i = 4; i >= 1; --i) v = v * z + i * p[static_cast<std::size_t>(i)];
  return v;
}

}  // namespace

std::array<double, 5> discriminant_polynomial(const ModelParams& params) {
  const double lambda = params.lambda();
  const double mu = params.mu();
  const Poly b = {lambda * mu + 1.0, lambda};
  const Poly c = {lambda * (mu - params.phi() + 1.0), lambda};
  const double d = lambda;
  const Poly b2 = mul(b, b);
  const Poly b3 = mul(b2, b);
  const Poly c2 = mul(c, c);
  const Poly c3 = mul(c2, c);
  Poly disc = mul(b, c);
  for (auto& v : disc) v *= 18.0 * d;
  disc = add(disc, b3, -4.0 * d);
  disc = add(disc, mul(b2, c2), 1.0);
  disc = add(disc, c3, -4.0);
  disc = add(disc, Poly{-27.0 * d * d}, 1.0);
  std::array<double, 5> out{};
  for (std::size_t i = 0; i < 5 && i < disc.size(); ++i) out[i] = disc[i];
  return out;
}

std::vector<double> discriminant_real_roots(const ModelParams& params) {
  const auto p = discriminant_polynomial(params);
  if (p[4] == 0.0) throw ConvergenceError("degenerate discriminant polynomial");
  Eigen::Matrix4d comp = Eigen::Matrix4d::Zero();
  for (int j = 0; j < 4; ++j) comp(0, j) = -p[static_cast<std::size_t>(3 - j)] / p[4];
  comp(1, 0) = comp(2, 1) = comp(3, 2) = 1.0;
  Eigen::EigenSolver<Eigen::Matrix4d> solver(comp, false);
  if (solver.info() != Eigen::Success) throw ConvergenceError("discriminant root solve failed");

  std::vector<double> roots;
  for (int i = 0; i < 4; ++i) {
    const std::complex<double> r = solver.eigenvalues()(i);
    if (std::abs(r.imag()) > 1e-7 * (1.0 + std::abs(r.real()))) continue;
    double x = r.real();
    // Newton on the closed-form discriminant (better conditioned than the expanded form).
    for (int it = 0; it < 50; ++it) {
      const double f = discriminant_P(params, x);
      const double df = eval_derivative(p, x);
      if (df == 0.0) break;
      const double step = f / df;
      if (!std::isfinite(step) || std::abs(step) > 1e-3 * (1.0 + std::abs(x))) break;
      x -= step;
      if (std::abs(step) <= 1e-15 * (1.0 + std::abs(x))) break;
    }
    roots.push_back(x);
  }
  std::sort(roots.begin(), roots.end());
  roots.erase(std::unique(roots.begin(), roots.end(),
                          [](double a, double b) { return std::abs(a - b) <= 1e-12 * (1.0 + std::abs(a)); }),
              roots.end());
  return roots;
}

std::vector<Interval> support_intervals(const ModelParams& params) {
  const auto roots = discriminant_real_roots(params);
  std::vector<Interval> out;
  for (std::size_t i = 0; i + 1 < roots.size(); ++i) {
    const double mid = 0.5 * (roots[i] + roots[i + 1]);
    if (discriminant_P(params, mid) < 0.0) {
      if (!out.empty() && std::abs(out.back().hi - roots[i]) <= 1e-12 * (1.0 + std::abs(roots[i]))) {
        out.back().hi = roots[i + 1];
      } else {
        out.push_back({roots[i], roots[i + 1]});
      }
    }
  }
  if (out.empty()) throw ConvergenceError("no support interval found for rho_P");
  return out;
}

EdgeReport edge_report(const ModelParams& params) {
  EdgeReport report;
  report.lambda = params.lambda();
  report.edges = discriminant_real_roots(params);
  report.upper_edge = support_intervals(params).back().hi;
  return report;
}

double upper_edge(const ModelParams& params) { return support_intervals(params).back().hi; }

double critical_lambda(double phi, double psi, const MuRule& mu_rule, double lambda_lo,
                       double lambda_hi) {
  if (!(lambda_lo > 0.0 && lambda_hi > lambda_lo)) {
    throw ValidationError("critical_lambda window must satisfy 0 < lo < hi");
  }
  auto edge_at = [&](double lambda) {
    return upper_edge(ModelParams(phi, psi, lambda, mu_rule(lambda)));
  };
  constexpr int kScan = 80;
  const double log_lo = std::log(lambda_lo);
  const double step = (std::log(lambda_hi) - log_lo) / kScan;
  double a = log_lo;
  double fa = edge_at(lambda_lo);
  for (int i = 1; i <= kScan; ++i) {
    double b = log_lo + i * step;
    const double fb = edge_at(std::exp(b));
    if ((fa < 0.0) != (fb < 0.0)) {
      for (int it = 0; it < 200 && (b - a) > 1e-15; ++it) {
        const double m = 0.5 * (a + b);
        const double fm = edge_at(std::exp(m));
        if ((fm < 0.0) == (fa < 0.0)) {
          a = m;
          fa = fm;
        } else {
          b = m;
        }
        if (b - a <= 1e-14) break;
      }
      return std::exp(0.5 * (a + b));
    }
    a = b;
    fa = fb;
  }
  throw NoBracket("upper edge of supp rho_P does not cross 0 for lambda in [" +
                  std::to_string(lambda_lo) + ", " + std::to_string(lambda_hi) + "]");
}

}  // namespace psdflow::spectral
