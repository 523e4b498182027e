#pragma once

#include <span>
#include <vector>

#include "psdflow/fixed_point.hpp"
#include "psdflow/spectral/measure.hpp"

namespace psdflow::flow {

/// Node data for the q_t fixed point at one time t > 0:
///   psi = u + u sum_i wp_i / (u + ap_i),   q = u sum_i wq_i kq_i / (u + aq_i)
/// with u = 1/q_tilde, a = 1/L_t(x) and k = e^{2tx}/L_t(x), L_t(x) = (e^{2tx} - 1)/x.
struct ResultOneNodes {
  double t = 0.0;
  std::vector<double> ap, wp;
  std::vector<double> aq, kq, wq;
};

/// Nodes from the exact rho_P, rho_Q: panels at most min(width/16, 0.25/t) wide, split at 0.
ResultOneNodes result_one_nodes(const spectral::SpectralMeasure& rho_p,
                                const spectral::SpectralMeasure& rho_q, double t);

/// Nodes from a realized spectrum: weights 1/n on the eigenvalues for P and the
/// overlaps w_i for Q.
ResultOneNodes result_one_nodes(std::span<const double> eigenvalues, std::span<const double> overlaps,
                                double t);

struct ResultOneSolution {
  double u = 0.0;  ///< 1/q_tilde
  double q = 0.0;
  int iterations = 0;
  double residual = 0.0;  ///< |u + u S(u) - psi| / psi
  bool used_newton = false;
};

/// Damped Picard on u from u0; if that stalls and cfg.restart is newton, safeguarded
/// Newton on log u bracketed in (0, psi]. Throws NonConvergence, QuadratureFailure.
ResultOneSolution solve_result_one(const ResultOneNodes& nodes, double psi, double u0,
                                   const FixedPointConfig& cfg);

}  // namespace psdflow::flow
