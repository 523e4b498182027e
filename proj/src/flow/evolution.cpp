#include "psdflow/flow/evolution.hpp"

#include <cmath>
#include <limits>
#include <string>

#include "psdflow/errors.hpp"
#include "psdflow/flow/result_one.hpp"
#include "psdflow/flow/transform.hpp"
#include "psdflow/io.hpp"
#include "psdflow/parallel.hpp"
#include "psdflow/spectral/measure.hpp"

namespace psdflow::flow {

const char* source_name(CurveSource source) {
  switch (source) {
    case CurveSource::theory:
      return "theory";
    case CurveSource::semi_analytic:
      return "semi_analytic";
    case CurveSource::simulation:
      return "simulation";
  }
  return "theory";
}

void validate_times(std::span<const double> times) {
  if (times.empty()) throw ValidationError("time list is empty");
  for (std::size_t i = 0; i < times.size(); ++i) {
    if (!std::isfinite(times[i]) || times[i] < 0.0) {
      throw ValidationError("times must be finite and >= 0");
    }
    if (i > 0 && !(times[i] > times[i - 1])) throw ValidationError("times must be strictly increasing");
  }
}

EvolutionCurve evolve_q(const ModelParams& params, std::span<const double> times,
                        const FixedPointConfig& cfg, EvolveMode mode) {
  validate_times(times);
  cfg.validate();
  const spectral::SpectralMeasure rho_p(spectral::TransformKind::P, params);
  const spectral::SpectralMeasure rho_q(spectral::TransformKind::Q, params);
  EvolutionCurve curve;
  curve.times.assign(times.begin(), times.end());
  curve.q.resize(times.size());
  curve.q_tilde.resize(times.size());
  curve.mse.assign(times.size(), std::numeric_limits<double>::quiet_NaN());
  curve.r = params.r();

  auto solve_at = [&](std::size_t i, double u0) {
    const auto nodes = result_one_nodes(rho_p, rho_q, times[i]);
    const auto sol = solve_result_one(nodes, params.psi(), u0, cfg);
    curve.q[i] = sol.q;
    curve.q_tilde[i] = 1.0 / sol.u;
    return sol.u;
  };
  if (mode == EvolveMode::sequential_warm) {
    double u = params.psi();
    for (std::size_t i = 0; i < times.size(); ++i) u = solve_at(i, u);
  } else {
    parallel_for(times.size(), [&](std::size_t i) { solve_at(i, params.psi()); });
  }
  return curve;
}

EvolutionCurve mse_curve(const ModelParams& params, std::span<const double> times,
                         const FixedPointConfig& cfg) {
  auto curve = evolve_q(params, times, cfg);
  std::vector<double> p(times.size());
  for (std::size_t i = 0; i < times.size(); ++i) {
    p[i] = eval_p(params, times[i], cfg);
    curve.mse[i] = curve.r - 2.0 * curve.q[i] + p[i];
  }
  curve.p = std::move(p);
  return curve;
}

double semi_analytic_q(std::span<const double> h_eigs, std::span<const double> overlaps, double psi,
                       double t, const FixedPointConfig& cfg) {
  const auto nodes = result_one_nodes(h_eigs, overlaps, t);
  return solve_result_one(nodes, psi, psi, cfg).q;
}

std::string curve_csv(const EvolutionCurve& curve) {
  io::CsvWriter csv({"t", "q", "q_tilde", "p", "mse", "source"});
  for (std::size_t i = 0; i < curve.times.size(); ++i) {
    const bool has_p = curve.p.has_value();
    csv.add_row({io::format_double(curve.times[i]), io::format_double(curve.q[i]),
                 io::format_double(curve.q_tilde[i]), has_p ? io::format_double((*curve.p)[i]) : "",
                 has_p ? io::format_double(curve.mse[i]) : "", source_name(curve.source)});
  }
  return csv.str();
}

EvolutionCurve parse_curve_csv(const std::string& text) {
  const auto table = io::parse_csv(text);
  EvolutionCurve curve;
  curve.times = table.numeric_column("t");
  curve.q = table.numeric_column("q");
  curve.q_tilde = table.numeric_column("q_tilde");
  const auto p_col = table.column("p");
  const auto mse_col = table.column("mse");
  const auto src_col = table.column("source");
  bool has_p = !table.rows.empty();
  for (const auto& row : table.rows) has_p = has_p && !row[p_col].empty();
  if (has_p) curve.p = table.numeric_column("p");
  for (const auto& row : table.rows) {
    curve.mse.push_back(row[mse_col].empty() ? std::numeric_limits<double>::quiet_NaN()
                                             : io::parse_double(row[mse_col]));
  }
  if (!table.rows.empty()) {
    const auto& s = table.rows.front()[src_col];
    curve.source = s == "simulation" ? CurveSource::simulation
                   : s == "semi_analytic" ? CurveSource::semi_analytic
                                          : CurveSource::theory;
  }
  return curve;
}

}  // namespace psdflow::flow
