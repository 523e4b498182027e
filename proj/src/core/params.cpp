#include "psdflow/params.hpp"

#include <cmath>
#include <string>

#include "psdflow/errors.hpp"
#include "psdflow/fixed_point.hpp"

namespace psdflow {

namespace {
void require(bool ok, const std::string& message) {
  if (!ok) throw ValidationError(message);
}
}  // namespace

ModelParams::ModelParams(double phi, double psi, double lambda, double mu)
    : phi_(phi), psi_(psi), lambda_(lambda), mu_(mu) {
  require(std::isfinite(phi) && phi > 0.0, "phi must be > 0 (got " + std::to_string(phi) + ")");
  require(std::isfinite(psi) && psi > 0.0, "psi must be > 0 (got " + std::to_string(psi) + ")");
  require(std::isfinite(lambda) && lambda > 0.0,
          "lambda must be > 0 (got " + std::to_string(lambda) + ")");
  require(std::isfinite(mu) && mu >= 0.0, "mu must be >= 0 (got " + std::to_string(mu) + ")");
}

void FixedPointConfig::validate() const {
  require(damping > 0.0 && damping <= 1.0, "damping must lie in (0, 1]");
  require(tol > 0.0, "tol must be > 0");
  require(max_iter >= 1, "max_iter must be >= 1");
  require(newton_max_iter >= 1, "newton_max_iter must be >= 1");
}

}  // namespace psdflow
