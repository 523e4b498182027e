#include "psdflow/flow/contour.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "psdflow/errors.hpp"
#include "psdflow/quadrature.hpp"

namespace psdflow::flow {

double Contour::weight_length() const {
  double s = 0.0;
  for (const auto& w : dz) s += std::abs(w);
  return s;
}

double Contour::perimeter() const {
  if (shape == Shape::circle) return 2.0 * std::numbers::pi * radius;
  return 4.0 * (half_width + half_height);
}

Contour Contour::rectangle(double lo, double hi, double margin, int count) {
  if (!(hi > lo)) throw ValidationError("rectangle contour needs lo < hi");
  if (!(margin > 0.0)) throw ValidationError("contour margin must be positive");
  const double pad = margin * (hi - lo);
  return box(cplx(0.5 * (lo + hi), 0.0), 0.5 * (hi - lo) + pad, std::max(pad, 0.05), count);
}

Contour Contour::box(cplx center, double half_width, double half_height, int count) {
  if (!(half_width > 0.0) || !(half_height > 0.0)) throw ValidationError("box extents must be positive");
  if (count < 64) throw ValidationError("rectangle contour needs at least 64 nodes");
  Contour c;
  c.shape = Shape::rectangle;
  c.center = center;
  c.half_width = half_width;
  c.half_height = half_height;
  const double w = c.half_width;
  const double h = c.half_height;
  const cplx corners[5] = {c.center + cplx(-w, -h), c.center + cplx(w, -h), c.center + cplx(w, h),
                           c.center + cplx(-w, h), c.center + cplx(-w, -h)};
  const GaussLegendre& gl = gauss_legendre(16);
  const double per = 4.0 * (w + h);
  const int total_panels = std::max(4, count / 16);
  for (int s = 0; s < 4; ++s) {
    const cplx a = corners[s];
    const cplx b = corners[s + 1];
    const int panels = std::max(1, static_cast<int>(std::lround(total_panels * std::abs(b - a) / per)));
    const cplx step = (b - a) / double(panels);
    for (int p = 0; p < panels; ++p) {
      const cplx mid = a + (p + 0.5) * step;
      for (std::size_t k = 0; k < gl.nodes.size(); ++k) {
        c.nodes.push_back(mid + 0.5 * gl.nodes[k] * step);
        c.dz.push_back(0.5 * gl.weights[k] * step);
      }
    }
  }
  return c;
}

Contour Contour::around_support(const ModelParams& params, double margin, int count) {
  const auto support = spectral::support_intervals(params);
  return rectangle(support.front().lo, support.back().hi, margin, count);
}

Contour Contour::circle(cplx center, double radius, int count) {
  if (!(radius > 0.0)) throw ValidationError("circle radius must be positive");
  if (count < 4) throw ValidationError("circle contour needs at least 4 nodes");
  Contour c;
  c.shape = Shape::circle;
  c.center = center;
  c.radius = radius;
  for (int k = 0; k < count; ++k) {
    const double th = 2.0 * std::numbers::pi * (k + 0.5) / count;
    const cplx e = std::polar(1.0, th);
    c.nodes.push_back(center + radius * e);
    c.dz.push_back(cplx(0.0, 1.0) * radius * e * (2.0 * std::numbers::pi / count));
  }
  return c;
}

bool Contour::encloses(const spectral::Interval& interval, double relative_margin) const {
  const double pad = relative_margin * std::max(interval.width(), 1e-12);
  if (shape == Shape::circle) {
    return std::abs(cplx(interval.lo - pad, 0.0) - center) < radius &&
           std::abs(cplx(interval.hi + pad, 0.0) - center) < radius;
  }
  return interval.lo - pad >= center.real() - half_width &&
         interval.hi + pad <= center.real() + half_width && std::abs(center.imag()) < half_height;
}

}  // namespace psdflow::flow
