#include "psdflow/simulate/config.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "psdflow/errors.hpp"

namespace psdflow::simulate {

const char* integrator_name(Integrator integrator) {
  switch (integrator) {
    case Integrator::euler_gd:
      return "euler_gd";
    case Integrator::rk4_ode:
      return "rk4_ode";
    case Integrator::closed_form:
      return "closed_form";
  }
  return "unknown";
}

Integrator parse_integrator(std::string_view name) {
  for (auto i : {Integrator::euler_gd, Integrator::rk4_ode, Integrator::closed_form}) {
    if (name == integrator_name(i)) return i;
  }
  throw ValidationError("unknown integrator '" + std::string(name) +
                        "' (expected euler_gd, rk4_ode or closed_form)");
}

SimConfig SimConfig::from_ratios(const ModelParams& params, int n) {
  if (n < 1) throw ValidationError("n must be >= 1");
  SimConfig cfg;
  cfg.n = n;
  cfg.d = std::max(1, static_cast<int>(std::lround(params.phi() * n)));
  cfg.m = std::max(1, static_cast<int>(std::lround(params.psi() * n)));
  cfg.lambda = params.lambda();
  cfg.mu = params.mu();
  return cfg;
}

void SimConfig::validate() const {
  if (n < 1 || m < 1 || d < 1) throw ValidationError("n, m, d must be >= 1");
  if (!(lambda > 0.0)) throw ValidationError("lambda must be > 0");
  if (!std::isfinite(mu)) throw ValidationError("mu must be finite");
  if (!(dt > 0.0) || !std::isfinite(dt)) throw ValidationError("dt must be > 0");
  if (!(t_max >= 0.0) || !std::isfinite(t_max)) throw ValidationError("t_max must be >= 0");
  if (trials < 1) throw ValidationError("trials must be >= 1");
  if (record_times.empty()) throw ValidationError("record_times must not be empty");
  for (std::size_t i = 0; i < record_times.size(); ++i) {
    const double t = record_times[i];
    if (!(t >= 0.0 && t <= t_max)) {
      throw ValidationError("record time " + std::to_string(t) + " outside [0, t_max]");
    }
    if (i > 0 && !(t > record_times[i - 1])) {
      throw ValidationError("record_times must be strictly increasing");
    }
  }
}

}  // namespace psdflow::simulate
