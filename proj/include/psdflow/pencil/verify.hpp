#pragma once

#include <array>
#include <cstdint>
#include <string>

#include "psdflow/pencil/pencil.hpp"

namespace psdflow::pencil {

enum class FiniteNRoute {
  automatic,   ///< literal up to n = 400, structured above
  literal,     ///< invert the assembled (2n + 2d) block matrix
  structured,  ///< block traces from the eigendecomposition of H
};

struct BlockStat {
  cplx mean;
  double std = 0.0;  ///< sample standard deviation of the complex trace
  cplx theory;
  double abs_dev = 0.0;
};

struct FiniteNReport {
  int n = 0;
  int d = 0;
  int trials = 0;
  cplx z;
  FiniteNRoute route = FiniteNRoute::automatic;
  std::array<std::array<BlockStat, 4>, 4> blocks;  ///< zero-based (i, j)
  double max_abs_dev = 0.0;
  /// Largest deviation of the closed-form inverse blocks from the numerical inverse
  /// (literal route only, NaN otherwise).
  double closed_form_deviation = 0.0;
  int resampled = 0;
};

/// Samples X*, xi at size n (d = round(phi n)) with per-trial seed `seed + trial`,
/// takes the normalized block traces of M_z^{-1} and compares their mean with the
/// fixed point of mz_spec. A near-singular sample is redrawn with the next seed, at
/// most 8 times. Throws SingularSample, ValidationError.
FiniteNReport verify_finite_n(const ModelParams& params, cplx z, int n, int trials, std::uint64_t seed,
                              FiniteNRoute route = FiniteNRoute::automatic);

/// Literal M_z for one sample, dense.
Eigen::MatrixXcd assemble_mz(const Eigen::MatrixXd& x_star, const Eigen::MatrixXd& xi, double lambda,
                             double mu, cplx z);

/// Max entry deviation of the closed-form inverse (built from K = (H - z)^{-1})
/// from the numerical inverse of the literal M_z.
double closed_form_inverse_deviation(const Eigen::MatrixXd& x_star, const Eigen::MatrixXd& xi,
                                     double lambda, double mu, cplx z);

/// JSON {n, trials, per_block: {fij: {mean, std, theory, abs_dev}}, ...}.
std::string report_json(const FiniteNReport& report);

}  // namespace psdflow::pencil
