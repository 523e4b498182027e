#pragma once

namespace psdflow {

/// What a fixed-point solve does once damped Picard iteration runs out of iterations.
enum class RestartPolicy {
  none,    ///< report NonConvergence immediately
  newton,  ///< polish the last Picard iterate with a safeguarded Newton solve
};

struct FixedPointConfig {
  double damping = 0.5;  ///< weight of the new iterate, in (0, 1]
  double tol = 1e-10;    ///< residual tolerance
  int max_iter = 500;
  RestartPolicy restart = RestartPolicy::newton;
  int newton_max_iter = 200;

  /// Throws ValidationError when damping is outside (0, 1], tol <= 0 or max_iter < 1.
  void validate() const;
};

}  // namespace psdflow
