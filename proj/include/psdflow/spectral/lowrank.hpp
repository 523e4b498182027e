#pragma once

#include <array>
#include <complex>

namespace psdflow::spectral {

struct LowRankQ1 {
  double physical = 0.0;
  /// Both roots of Q(1)(Q(1) lambda - lambda + 1) = 0, ascending.
  std::array<double, 2> roots{};
};

/// phi -> 0 overlap: max(0, 1 - 1/lambda). Throws ValidationError for lambda <= 0.
LowRankQ1 lowrank_Q1(double lambda);

struct LowRankQhat {
  std::complex<double> q_hat;
  /// (1 - z) q_hat(z)
  std::complex<double> calQ;
};

/// Herglotz root of Qhat^2 (z - 1) - Qhat (z - 2 + 1/lambda) - 1 = 0.
/// Throws PoleAtOne at z = 1.
LowRankQhat lowrank_Qhat(double lambda, std::complex<double> z);

}  // namespace psdflow::spectral
