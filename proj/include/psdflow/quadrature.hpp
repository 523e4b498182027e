#pragma once

#include <functional>
#include <vector>

namespace psdflow {

/// Gauss-Legendre rule on [-1, 1].
struct GaussLegendre {
  std::vector<double> nodes;
  std::vector<double> weights;
};

/// n-point rule, computed once per n and cached (thread-safe).
const GaussLegendre& gauss_legendre(int n);

/// Composite Gauss-Legendre integral of f over [a, b] with `panels` equal panels.
double integrate_gl(const std::function<double(double)>& f, double a, double b, int panels,
                    int order = 16);

}  // namespace psdflow
