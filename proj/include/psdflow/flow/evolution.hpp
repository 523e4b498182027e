#pragma once

#include <optional>
#include <span>
#include <string>
#include <vector>

#include "psdflow/fixed_point.hpp"
#include "psdflow/params.hpp"

namespace psdflow::flow {

enum class CurveSource { theory, semi_analytic, simulation };
const char* source_name(CurveSource source);

struct EvolutionCurve {
  std::vector<double> times;
  std::vector<double> q;
  std::vector<double> q_tilde;
  std::optional<std::vector<double>> p;
  /// r - 2 q + p per row; NaN where p is absent
  std::vector<double> mse;
  CurveSource source = CurveSource::theory;
  double r = 0.0;
};

enum class EvolveMode {
  sequential_warm,  ///< u warm-started from the previous time
  parallel_cold,    ///< every time solved from u = psi, in parallel
};

/// q_t and q_tilde_t on the given strictly increasing, nonnegative times.
/// Throws ValidationError, NonConvergence, QuadratureFailure.
EvolutionCurve evolve_q(const ModelParams& params, std::span<const double> times,
                        const FixedPointConfig& cfg = {},
                        EvolveMode mode = EvolveMode::sequential_warm);

/// evolve_q plus p_t from eval_p at every time, and mse = r - 2 q + p.
EvolutionCurve mse_curve(const ModelParams& params, std::span<const double> times,
                         const FixedPointConfig& cfg = {});

/// q_t predicted for one realized H from its eigenvalues h_i and overlaps
/// w_i = |X*^T v_i|^2 / d (finite-n form of the q_t fixed point).
double semi_analytic_q(std::span<const double> h_eigs, std::span<const double> overlaps, double psi,
                       double t, const FixedPointConfig& cfg = {});

/// CSV t,q,q_tilde,p,mse,source.
std::string curve_csv(const EvolutionCurve& curve);
EvolutionCurve parse_curve_csv(const std::string& text);

/// Validates a time list: finite, nonnegative, strictly increasing, non-empty.
void validate_times(std::span<const double> times);

}  // namespace psdflow::flow
