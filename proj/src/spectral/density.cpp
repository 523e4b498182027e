#include "psdflow/spectral/density.hpp"

#include <algorithm>
#include <cmath>
#include <json.hpp>
#include <numbers>

#include "psdflow/errors.hpp"
#include "psdflow/io.hpp"

namespace psdflow::spectral {

namespace {

std::vector<Interval> threshold_runs(const std::vector<double>& grid,
                                     const std::vector<double>& values) {
  std::vector<Interval> runs;
  std::size_t i = 0;
  while (i < grid.size()) {
    if (values[i] <= kDensityThreshold) {
      ++i;
      continue;
    }
    std::size_t j = i;
    while (j + 1 < grid.size() && values[j + 1] > kDensityThreshold) ++j;
    runs.push_back({grid[i], grid[j]});
    i = j + 1;
  }
  return runs;
}

// Bisection on the discriminant sign between an outside point and an inside point.
double refine_edge(const ModelParams& params, double outside, double inside) {
  for (int it = 0; it < 200 && std::abs(inside - outside) > 1e-12; ++it) {
    const double mid = 0.5 * (inside + outside);
    if (discriminant_P(params, mid) < 0.0) {
      inside = mid;
    } else {
      outside = mid;
    }
  }
  return 0.5 * (inside + outside);
}

double trapezoid_between(const std::vector<double>& grid, const std::vector<double>& values,
                         double lo, double hi, int k) {
  auto g = [&](std::size_t i) { return values[i] * std::pow(grid[i], k); };
  double total = 0.0;
  for (std::size_t i = 0; i + 1 < grid.size(); ++i) {
    const double a = std::max(grid[i], lo);
    const double b = std::min(grid[i + 1], hi);
    if (!(b > a)) continue;
    const double h = grid[i + 1] - grid[i];
    auto interp = [&](double x) { return g(i) + (g(i + 1) - g(i)) * (x - grid[i]) / h; };
    total += 0.5 * (b - a) * (interp(a) + interp(b));
  }
  return total;
}

}  // namespace

GridSpec GridSpec::around_support(const ModelParams& params, int points) {
  const auto support = support_intervals(params);
  const double lo = support.front().lo;
  const double hi = support.back().hi;
  const double margin = 0.1 * std::max(hi - lo, 1e-3);
  return {lo - margin, hi + margin, points, 1e-6};
}

std::vector<double> GridSpec::abscissae() const {
  validate();
  std::vector<double> out(static_cast<std::size_t>(points));
  for (int i = 0; i < points; ++i) out[static_cast<std::size_t>(i)] = lo + (hi - lo) * i / (points - 1);
  return out;
}

void GridSpec::validate() const {
  if (!(std::isfinite(lo) && std::isfinite(hi) && hi > lo)) {
    throw ValidationError("grid window must satisfy lo < hi");
  }
  if (points < 2) throw ValidationError("grid needs at least 2 points");
  if (!(epsilon > 0.0)) throw ValidationError("grid epsilon must be positive");
}

SpectralDensity density(TransformKind kind, const ModelParams& params, const GridSpec& spec) {
  SpectralDensity out;
  out.grid = spec.abscissae();
  const auto measure = std::make_shared<const SpectralMeasure>(kind, params);
  out.source = measure;
  const auto& exact_support = measure->support();
  const double step = (spec.hi - spec.lo) / (spec.points - 1);

  out.values.resize(out.grid.size());
  for (std::size_t i = 0; i < out.grid.size(); ++i) {
    const double x = out.grid[i];
    const double full = solve_cubic_branch(kind, params, cplx(x, spec.epsilon)).imag() / std::numbers::pi;
    const double half =
        solve_cubic_branch(kind, params, cplx(x, 0.5 * spec.epsilon)).imag() / std::numbers::pi;
    out.values[i] = std::max(0.0, 2.0 * half - full);
    double edge_distance = std::numeric_limits<double>::infinity();
    for (const auto& s : exact_support) {
      edge_distance = std::min({edge_distance, std::abs(x - s.lo), std::abs(x - s.hi)});
    }
    // Square-root edges make the eps dependence non-linear within O(eps) of an edge.
    if (edge_distance > 100.0 * spec.epsilon) {
      out.richardson_gap = std::max(out.richardson_gap, std::abs(full - half));
    }
  }
  if (out.richardson_gap > 1e-3) {
    throw ConvergenceError("density at eps and eps/2 differ by " + std::to_string(out.richardson_gap));
  }

  for (auto run : threshold_runs(out.grid, out.values)) {
    if (run.lo > spec.lo) run.lo = refine_edge(params, run.lo - step, run.lo);
    if (run.hi < spec.hi) run.hi = refine_edge(params, run.hi + step, run.hi);
    if (!out.support.empty() && run.lo <= out.support.back().hi) {
      out.support.back().hi = std::max(out.support.back().hi, run.hi);
    } else {
      out.support.push_back(run);
    }
  }

  out.mass = out.source->integrate([](double) { return 1.0; }, spec.lo, spec.hi);
  if (std::abs(out.mass - 1.0) > kMassTolerance) {
    throw MassDeficit("mass " + std::to_string(out.mass) + " in window [" + std::to_string(spec.lo) +
                      ", " + std::to_string(spec.hi) + "]");
  }
  return out;
}

SpectralDensity density_from_samples(std::vector<double> grid, std::vector<double> values,
                                     double atom_at_zero) {
  if (grid.size() != values.size() || grid.size() < 2) {
    throw ValidationError("density grid and values must have equal length >= 2");
  }
  if (!std::is_sorted(grid.begin(), grid.end())) throw ValidationError("density grid must be ordered");
  SpectralDensity out;
  out.grid = std::move(grid);
  out.values = std::move(values);
  for (auto& v : out.values) v = std::max(v, 0.0);
  out.atom_at_zero = atom_at_zero;
  out.support = threshold_runs(out.grid, out.values);
  out.mass = trapezoid_between(out.grid, out.values, out.grid.front(), out.grid.back(), 0) + atom_at_zero;
  return out;
}

double cdf(const SpectralDensity& density, double x) {
  if (density.source) return density.source->cdf(x) + (x >= 0.0 ? density.atom_at_zero : 0.0);
  const double lo = density.grid.front();
  double total = trapezoid_between(density.grid, density.values, lo, x, 0);
  if (x >= 0.0) total += density.atom_at_zero;
  return total;
}

double moment(const SpectralDensity& density, int k, double lower) {
  if (k < 0 || k > 2) throw ValidationError("moment order must be 0, 1 or 2");
  const double atom = (k == 0 && lower <= 0.0) ? density.atom_at_zero : 0.0;
  if (density.source) return density.source->moment(k, lower) + atom;
  return trapezoid_between(density.grid, density.values, lower, density.grid.back(), k) + atom;
}

SpectralDensity signal_spectrum(double phi, int points) {
  if (!(phi > 0.0)) throw ValidationError("phi must be > 0");
  if (points < 3) throw ValidationError("signal spectrum needs at least 3 points");
  auto measure = std::make_shared<const MarchenkoPasturMeasure>(phi);
  const double a = measure->lower_edge();
  const double b = measure->upper_edge();
  const double c = 0.5 * (a + b);
  const double r = 0.5 * (b - a);
  std::vector<double> grid(static_cast<std::size_t>(points));
  std::vector<double> values(grid.size());
  for (int i = 0; i < points; ++i) {
    const double x = c - r * std::cos(std::numbers::pi * i / (points - 1));
    grid[static_cast<std::size_t>(i)] = x;
    values[static_cast<std::size_t>(i)] = measure->density(x);
  }
  auto out = density_from_samples(std::move(grid), std::move(values), phi > 1.0 ? 1.0 - 1.0 / phi : 0.0);
  out.source = measure;
  out.mass = measure->moment(0) + out.atom_at_zero;
  return out;
}

std::string density_csv(const SpectralDensity& density) {
  io::CsvWriter csv({"x", "rho"});
  for (std::size_t i = 0; i < density.grid.size(); ++i) {
    csv.add_row({io::format_double(density.grid[i]), io::format_double(density.values[i])});
  }
  return csv.str();
}

std::string edge_report_json(const EdgeReport& report) {
  nlohmann::json j;
  j["lambda"] = report.lambda;
  j["edges"] = report.edges;
  j["upper_edge"] = report.upper_edge;
  return j.dump(2);
}

}  // namespace psdflow::spectral
