#include "psdflow/flow/asymptotics.hpp"

#include <cmath>
#include <json.hpp>
#include <string>

#include "psdflow/errors.hpp"
#include "psdflow/spectral/measure.hpp"

namespace psdflow::flow {

const char* regime_name(Regime regime) {
  return regime == Regime::alpha_zero ? "alpha_zero" : "underparam_positive_alpha";
}

AsymptoticSolution asymptotics(const ModelParams& params) {
  using spectral::SpectralMeasure;
  using spectral::TransformKind;
  const SpectralMeasure rho_p(TransformKind::P, params);
  const SpectralMeasure rho_q(TransformKind::Q, params);
  const double target = 1.0 - params.psi();

  AsymptoticSolution out;
  if (rho_p.cdf(0.0) >= target) {
    out.regime = Regime::alpha_zero;
    out.alpha = 0.0;
  } else {
    out.regime = Regime::underparam_positive_alpha;
    double lo = 0.0;
    double hi = rho_p.upper_edge();
    if (!(rho_p.cdf(hi) > target)) {
      throw CdfBracketFailure("F_P does not reach 1 - psi = " + std::to_string(target) +
                              " below the upper edge");
    }
    while (hi - lo > 1e-10) {
      const double mid = 0.5 * (lo + hi);
      if (rho_p.cdf(mid) < target) {
        lo = mid;
      } else {
        hi = mid;
      }
    }
    out.alpha = 0.5 * (lo + hi);
  }

  out.q_inf = rho_q.integrate([](double x) { return x; }, out.alpha);
  out.p_inf = rho_p.integrate([](double x) { return x * x; }, out.alpha) / params.phi();

  const double width = rho_p.upper_edge() - rho_p.lower_edge();
  const double breaks[] = {out.alpha};
  const auto rp = rho_p.rule(width / 64.0, breaks);
  const auto rq = rho_q.rule(width / 64.0, breaks);
  double kept = 0.0;
  for (std::size_t i = 0; i < rq.size(); ++i) {
    if (rq.x[i] > out.alpha) kept += 2.0 * rq.x[i] * rq.w[i];
  }
  for (std::size_t i = 0; i < rp.size(); ++i) {
    if (rp.x[i] > out.alpha) kept -= rp.x[i] * rp.x[i] * rp.w[i] / params.phi();
  }
  out.mse_inf = params.r() - kept;
  return out;
}

std::string asymptote_json(const AsymptoticSolution& solution) {
  nlohmann::json j;
  j["alpha"] = solution.alpha;
  j["q_inf"] = solution.q_inf;
  j["p_inf"] = solution.p_inf;
  j["mse_inf"] = solution.mse_inf;
  j["regime"] = regime_name(solution.regime);
  return j.dump(2);
}

}  // namespace psdflow::flow
