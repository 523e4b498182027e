#pragma once

#include <string>

#include "psdflow/params.hpp"

namespace psdflow::flow {

enum class Regime { underparam_positive_alpha, alpha_zero };
const char* regime_name(Regime regime);

struct AsymptoticSolution {
  double alpha = 0.0;
  double q_inf = 0.0;
  double p_inf = 0.0;
  double mse_inf = 0.0;
  Regime regime = Regime::alpha_zero;
};

/// t -> infinity limit: the flow keeps the eigen-directions of H above alpha, where
/// F_P(alpha) = 1 - psi (alpha = 0 when F_P(0) >= 1 - psi). q_inf and p_inf are truncated
/// moments of rho_Q and rho_P; mse_inf is the truncated integral of 2 x rho_Q - x^2 rho_P / phi
/// subtracted from r, evaluated on its own quadrature.
/// Throws CdfBracketFailure if F_P - (1 - psi) does not change sign on [0, upper edge].
AsymptoticSolution asymptotics(const ModelParams& params);

std::string asymptote_json(const AsymptoticSolution& solution);

}  // namespace psdflow::flow
