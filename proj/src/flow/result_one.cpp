#include "psdflow/flow/result_one.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "integrands.hpp"
#include "psdflow/errors.hpp"
#include "psdflow/kernels.hpp"

namespace psdflow::flow {

namespace {

void build_terms(ResultOneNodes& nodes, const std::vector<double>& xp, const std::vector<double>& xq) {
  auto check = [&](double x, const detail::ResultOneTerms& r) {
    if (!std::isfinite(r.inv_l) || !std::isfinite(r.k)) {
      throw QuadratureFailure("non-finite integrand at x = " + std::to_string(x) +
                              ", t = " + std::to_string(nodes.t));
    }
  };
  nodes.ap.resize(xp.size());
  for (std::size_t i = 0; i < xp.size(); ++i) {
    const auto r = detail::result_one_terms(xp[i], nodes.t);
    check(xp[i], r);
    nodes.ap[i] = r.inv_l;
  }
  nodes.aq.resize(xq.size());
  nodes.kq.resize(xq.size());
  for (std::size_t i = 0; i < xq.size(); ++i) {
    const auto r = detail::result_one_terms(xq[i], nodes.t);
    check(xq[i], r);
    nodes.aq[i] = r.inv_l;
    nodes.kq[i] = r.k;
  }
}

}  // namespace

ResultOneNodes result_one_nodes(const spectral::SpectralMeasure& rho_p,
                                const spectral::SpectralMeasure& rho_q, double t) {
  if (!(t >= 0.0) || !std::isfinite(t)) throw ValidationError("time must be finite and >= 0");
  const double width = rho_p.upper_edge() - rho_p.lower_edge();
  double max_width = width / 16.0;
  if (t > 0.0) max_width = std::min(max_width, 0.25 / t);
  const double breaks[] = {0.0};
  const auto rp = rho_p.rule(max_width, breaks);
  const auto rq = rho_q.rule(max_width, breaks);
  ResultOneNodes nodes;
  nodes.t = t;
  nodes.wp = rp.w;
  nodes.wq = rq.w;
  if (t > 0.0) {
    build_terms(nodes, rp.x, rq.x);
  } else {
    nodes.ap.assign(rp.x.size(), 0.0);
    nodes.aq.assign(rq.x.size(), 0.0);
    nodes.kq.assign(rq.x.size(), 0.0);
  }
  return nodes;
}

ResultOneNodes result_one_nodes(std::span<const double> eigenvalues, std::span<const double> overlaps,
                                double t) {
  if (eigenvalues.size() != overlaps.size() || eigenvalues.empty()) {
    throw ValidationError("eigenvalues and overlaps must be non-empty with equal length");
  }
  if (!(t >= 0.0) || !std::isfinite(t)) throw ValidationError("time must be finite and >= 0");
  ResultOneNodes nodes;
  nodes.t = t;
  const std::vector<double> x(eigenvalues.begin(), eigenvalues.end());
  nodes.wp.assign(x.size(), 1.0 / double(x.size()));
  nodes.wq.assign(overlaps.begin(), overlaps.end());
  if (t > 0.0) {
    build_terms(nodes, x, x);
  } else {
    nodes.ap.assign(x.size(), 0.0);
    nodes.aq.assign(x.size(), 0.0);
    nodes.kq.assign(x.size(), 0.0);
  }
  return nodes;
}

ResultOneSolution solve_result_one(const ResultOneNodes& nodes, double psi, double u0,
                                   const FixedPointConfig& cfg) {
  cfg.validate();
  if (!(psi > 0.0)) throw ValidationError("psi must be > 0");
  ResultOneSolution sol;
  if (nodes.t == 0.0) {
    // L_0 = 0: the fixed point reads psi q_tilde = 1 and the q integrand is 1/q_tilde.
    double mass = 0.0;
    for (double w : nodes.wq) mass += w;
    sol.u = psi;
    sol.q = psi * mass;
    return sol;
  }

  auto residual = [&](double u, double s0) { return std::abs(u * (1.0 + s0) - psi) / psi; };
  double u = (u0 > 0.0 && u0 <= psi) ? u0 : psi;
  bool done = false;
  for (int it = 0; it < cfg.max_iter; ++it) {
    const double s0 = kernels::shift_sums(nodes.wp, nodes.ap, u).first;
    sol.residual = residual(u, s0);
    sol.iterations = it + 1;
    if (sol.residual <= cfg.tol) {
      done = true;
      break;
    }
    u = (1.0 - cfg.damping) * u + cfg.damping * psi / (1.0 + s0);
  }

  if (!done && cfg.restart == RestartPolicy::newton) {
    sol.used_newton = true;
    double log_lo = std::log(psi) - 690.0;
    double log_hi = std::log(psi);
    double v = std::clamp(std::log(u), log_lo, log_hi);
    for (int it = 0; it < cfg.newton_max_iter; ++it) {
      u = std::exp(v);
      const auto s = kernels::shift_sums(nodes.wp, nodes.ap, u);
      const double g = u * (1.0 + s.first) - psi;
      sol.residual = std::abs(g) / psi;
      ++sol.iterations;
      if (sol.residual <= cfg.tol) {
        done = true;
        break;
      }
      if (g < 0.0) {
        log_lo = v;
      } else {
        log_hi = v;
      }
      const double dg = u * (1.0 + s.first - u * s.second);
      double next = dg > 0.0 ? v - g / dg : 0.5 * (log_lo + log_hi);
      if (!(next > log_lo && next < log_hi)) next = 0.5 * (log_lo + log_hi);
      if (log_hi - log_lo < 1e-15) break;
      v = next;
    }
  }
  if (!done) {
    throw NonConvergence("q_tilde fixed point at t = " + std::to_string(nodes.t) + " (residual " +
                         std::to_string(sol.residual) + ")");
  }
  sol.u = u;
  sol.q = u * kernels::weighted_shift_sum(nodes.wq, nodes.kq, nodes.aq, u);
  if (!std::isfinite(sol.q)) throw QuadratureFailure("non-finite q at t = " + std::to_string(nodes.t));
  return sol;
}

}  // namespace psdflow::flow
