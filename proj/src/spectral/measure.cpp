#include "psdflow/spectral/measure.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "psdflow/errors.hpp"
#include "psdflow/quadrature.hpp"

namespace psdflow::spectral {

namespace {

constexpr int kMaxPanelsPerBulk = 20000;
constexpr int kIntegratePanels = 64;

double theta_of(const Interval& bulk, double x) {
  const double c = 0.5 * (bulk.lo + bulk.hi);
  const double r = 0.5 * bulk.width();
  return std::acos(std::clamp((c - x) / r, -1.0, 1.0));
}

// Integral over bulk intersected with [lower, upper] in the variable theta, where
// x = c - r cos(theta); `weight(x, theta)` is the density times dx/dtheta.
template <class Weight>
double integrate_bulk(const Interval& bulk, double lower, double upper,
                      const std::function<double(double)>& f, Weight weight) {
  const GaussLegendre& gl = gauss_legendre(16);
  double total = 0.0;
  const double a = std::max(bulk.lo, lower);
  const double b = std::min(bulk.hi, upper);
  if (!(b > a)) return 0.0;
  const double c = 0.5 * (bulk.lo + bulk.hi);
  const double r = 0.5 * bulk.width();
  const double t0 = theta_of(bulk, a);
  const double t1 = theta_of(bulk, b);
  const int panels =
      std::max(4, static_cast<int>(std::ceil(kIntegratePanels * (t1 - t0) / std::numbers::pi)));
  const double h = (t1 - t0) / panels;
  for (int p = 0; p < panels; ++p) {
    const double mid = t0 + (p + 0.5) * h;
    for (std::size_t k = 0; k < gl.nodes.size(); ++k) {
      const double th = mid + 0.5 * h * gl.nodes[k];
      const double x = c - r * std::cos(th);
      const double wx = weight(x, th);
      if (wx <= 0.0) continue;
      total += gl.weights[k] * 0.5 * h * wx * f(x);
    }
  }
  return total;
}

}  // namespace

double MeasureRule::mass() const {
  double s = 0.0;
  for (double v : w) s += v;
  return s;
}

SpectralMeasure::SpectralMeasure(TransformKind kind, ModelParams params)
    : kind_(kind), params_(params), support_(support_intervals(params)) {}

double SpectralMeasure::density(double x) const {
  if (discriminant_P(params_, x) >= 0.0) return 0.0;
  const auto roots = cubic_roots(transform_cubic(kind_, params_, cplx(x, 0.0)));
  double im = 0.0;
  for (const auto& r : roots) im = std::max(im, r.imag());
  return im / std::numbers::pi;
}

MeasureRule SpectralMeasure::rule(double max_width, std::span<const double> breakpoints,
                                  int order) const {
  if (!(max_width > 0.0)) throw ValidationError("rule max_width must be positive");
  const GaussLegendre& gl = gauss_legendre(order);
  MeasureRule out;
  for (const auto& bulk : support_) {
    const double c = 0.5 * (bulk.lo + bulk.hi);
    const double r = 0.5 * bulk.width();
    if (r <= 0.0) continue;
    const int panels = std::clamp(static_cast<int>(std::ceil(std::numbers::pi * r / max_width)), 8,
                                  kMaxPanelsPerBulk);
    std::vector<double> cuts;
    cuts.reserve(static_cast<std::size_t>(panels) + 1 + breakpoints.size());
    for (int i = 0; i <= panels; ++i) cuts.push_back(std::numbers::pi * i / panels);
    for (double b : breakpoints) {
      if (b > bulk.lo && b < bulk.hi) cuts.push_back(theta_of(bulk, b));
    }
    std::sort(cuts.begin(), cuts.end());
    cuts.erase(std::unique(cuts.begin(), cuts.end(),
                           [](double a, double b) { return b - a < 1e-12; }),
               cuts.end());
    for (std::size_t p = 0; p + 1 < cuts.size(); ++p) {
      const double half = 0.5 * (cuts[p + 1] - cuts[p]);
      const double mid = 0.5 * (cuts[p + 1] + cuts[p]);
      for (std::size_t k = 0; k < gl.nodes.size(); ++k) {
        const double th = mid + half * gl.nodes[k];
        const double x = c - r * std::cos(th);
        const double rho = density(x);
        if (rho <= 0.0) continue;
        out.x.push_back(x);
        out.w.push_back(gl.weights[k] * half * r * std::sin(th) * rho);
      }
    }
  }
  return out;
}

double SpectralMeasure::integrate(const std::function<double(double)>& f, double lower,
                                  double upper) const {
  double total = 0.0;
  for (const auto& bulk : support_) {
    const double r = 0.5 * bulk.width();
    total += integrate_bulk(bulk, lower, upper, f,
                            [&](double x, double th) { return r * std::sin(th) * density(x); });
  }
  return total;
}

MarchenkoPasturMeasure::MarchenkoPasturMeasure(double ratio)
    : ratio_(ratio),
      lo_(std::pow(1.0 - std::sqrt(ratio), 2)),
      hi_(std::pow(1.0 + std::sqrt(ratio), 2)) {
  if (!(ratio > 0.0) || !std::isfinite(ratio)) throw ValidationError("ratio must be > 0");
}

double MarchenkoPasturMeasure::density(double x) const {
  const double s = (hi_ - x) * (x - lo_);
  if (!(s > 0.0) || !(x > 0.0)) return 0.0;
  return std::sqrt(s) / (2.0 * std::numbers::pi * ratio_ * x);
}

double MarchenkoPasturMeasure::integrate(const std::function<double(double)>& f, double lower,
                                         double upper) const {
  const double r = 0.5 * (hi_ - lo_);
  // density * dx/dtheta = r^2 sin^2(theta) / (2 pi ratio x), finite even when lo = 0
  return integrate_bulk({lo_, hi_}, lower, upper, f, [&](double x, double th) {
    const double s = std::sin(th);
    return x > 0.0 ? r * r * s * s / (2.0 * std::numbers::pi * ratio_ * x) : 0.0;
  });
}

double Measure::cdf(double x) const {
  return integrate([](double) { return 1.0; }, -std::numeric_limits<double>::infinity(), x);
}

double Measure::moment(int k, double lower) const {
  if (k < 0 || k > 2) throw ValidationError("moment order must be 0, 1 or 2");
  return integrate([k](double x) { return k == 0 ? 1.0 : (k == 1 ? x : x * x); }, lower);
}

}  // namespace psdflow::spectral
