#pragma once

#include <complex>
#include <vector>

#include "psdflow/spectral/edges.hpp"

namespace psdflow::flow {

using cplx = std::complex<double>;

/// Closed counter-clockwise quadrature path: sum_k f(nodes[k]) * dz[k] ~ closed integral of f dz.
struct Contour {
  enum class Shape { rectangle, circle };

  Shape shape = Shape::rectangle;
  cplx center{};
  double half_width = 0.0;   ///< rectangle
  double half_height = 0.0;  ///< rectangle
  double radius = 0.0;       ///< circle
  std::vector<cplx> nodes;
  std::vector<cplx> dz;

  std::size_t size() const { return nodes.size(); }
  /// Sum of |dz|, equal to the perimeter.
  double weight_length() const;
  double perimeter() const;

  /// Rectangle around [lo, hi] extended by margin * (hi - lo) on every side, with
  /// Gauss-Legendre panels of 16 points distributed over the sides (about `count` nodes).
  static Contour rectangle(double lo, double hi, double margin = 0.2, int count = 512);
  /// Rectangle with the given center and half extents.
  static Contour box(cplx center, double half_width, double half_height, int count = 512);
  /// Rectangle around the full support of rho_P.
  static Contour around_support(const ModelParams& params, double margin = 0.2, int count = 512);
  /// Trapezoidal rule on |z - center| = radius with nodes at angles 2 pi (k + 1/2) / count.
  static Contour circle(cplx center, double radius, int count);

  /// True if the interval lies inside with at least `relative_margin` * width to spare.
  bool encloses(const spectral::Interval& interval, double relative_margin = 0.1) const;
};

}  // namespace psdflow::flow
