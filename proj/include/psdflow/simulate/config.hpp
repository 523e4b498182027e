#pragma once

#include <cstdint>
#include <string_view>
#include <vector>

#include "psdflow/params.hpp"

namespace psdflow::simulate {

enum class Integrator { euler_gd, rk4_ode, closed_form };

const char* integrator_name(Integrator integrator);
/// Accepts "euler_gd", "rk4_ode", "closed_form". Throws ValidationError.
Integrator parse_integrator(std::string_view name);

struct SimConfig {
  int n = 100;
  int m = 25;
  int d = 75;
  double lambda = 1e4;  ///< +inf switches the noise off
  double mu = 0.0;
  double dt = 1e-3;
  double t_max = 1.0;
  std::vector<double> record_times = {0.0, 1.0};
  int trials = 1;
  std::uint64_t seed = 0;
  Integrator integrator = Integrator::euler_gd;
  /// Diagonal noise variance 2/n instead of 1/n.
  bool goe_diagonal = false;

  /// n, m, d from the ratios of `params` at size n (each at least 1).
  static SimConfig from_ratios(const ModelParams& params, int n);

  /// Throws ValidationError naming the violated invariant.
  void validate() const;

  double phi() const { return static_cast<double>(d) / n; }
  double psi() const { return static_cast<double>(m) / n; }
};

}  // namespace psdflow::simulate
