#pragma once

#include <array>
#include <vector>

#include "psdflow/params.hpp"

namespace psdflow::spectral {

struct Interval {
  double lo = 0.0;
  double hi = 0.0;
  double width() const { return hi - lo; }
  bool contains(double x) const { return lo <= x && x <= hi; }
};

/// Discriminant of the P cubic as a polynomial in z (ascending coefficients, degree 4).
std::array<double, 5> discriminant_polynomial(const ModelParams& params);

struct EdgeReport {
  double lambda = 0.0;
  std::vector<double> edges;  ///< ordered real roots of the discriminant in z
  double upper_edge = 0.0;    ///< max of supp rho_P
};

/// Real roots of the discriminant (companion eigenvalues polished by Newton on the
/// closed-form discriminant), ascending.
std::vector<double> discriminant_real_roots(const ModelParams& params);

/// Disjoint closed intervals where the discriminant is negative, i.e. supp rho_P.
/// Adjacent intervals that touch are merged.
std::vector<Interval> support_intervals(const ModelParams& params);

EdgeReport edge_report(const ModelParams& params);

double upper_edge(const ModelParams& params);

/// lambda at which the upper edge of supp rho_P crosses 0, for mu = mu_rule(lambda).
/// Bracketed on a log grid over [lambda_lo, lambda_hi], then bisected.
/// Throws NoBracket if upper_edge does not change sign over the window.
double critical_lambda(double phi, double psi, const MuRule& mu_rule, double lambda_lo = 1e-4,
                       double lambda_hi = 1e3);

}  // namespace psdflow::spectral
