#pragma once

#include <limits>
#include <memory>
#include <string>
#include <vector>

#include "psdflow/params.hpp"
#include "psdflow/spectral/edges.hpp"
#include "psdflow/spectral/measure.hpp"
#include "psdflow/spectral/stieltjes.hpp"

namespace psdflow::spectral {

struct GridSpec {
  double lo = 0.0;
  double hi = 0.0;
  int points = 2001;
  double epsilon = 1e-6;

  /// Window covering supp rho_P with a 10% margin on each side.
  static GridSpec around_support(const ModelParams& params, int points = 2001);
  std::vector<double> abscissae() const;
  void validate() const;
};

inline constexpr double kDensityThreshold = 1e-8;
inline constexpr double kMassTolerance = 1e-4;

struct SpectralDensity {
  std::vector<double> grid;
  std::vector<double> values;
  std::vector<Interval> support;
  double atom_at_zero = 0.0;
  /// Mass in the window, computed on the refined support.
  double mass = 0.0;
  /// max |rho_eps - rho_{eps/2}| over the grid.
  double richardson_gap = 0.0;
  /// Exact measure the grid was sampled from, when there is one.
  std::shared_ptr<const Measure> source;
};

/// rho(x) on the grid from Im branch(x + i eps)/pi, extrapolated to eps -> 0 with the
/// eps/2 evaluation. Support intervals are found by thresholding and their edges are
/// refined by bisection on the discriminant sign.
///
/// Throws MassDeficit if the window mass deviates from 1 by more than 1e-4 and
/// ConvergenceError if the eps and eps/2 evaluations disagree by more than 1e-3.
SpectralDensity density(TransformKind kind, const ModelParams& params, const GridSpec& grid);

/// Builds a density from sampled values (e.g. rho_{Z_t}); support from thresholding.
SpectralDensity density_from_samples(std::vector<double> grid, std::vector<double> values,
                                     double atom_at_zero);

/// Integral of the density up to x, including the atom at 0 when x >= 0.
double cdf(const SpectralDensity& density, double x);

/// Integral of z^k rho(z) over [lower, inf), k in {0, 1, 2}, including the atom.
double moment(const SpectralDensity& density, int k,
              double lower = -std::numeric_limits<double>::infinity());

/// Spectrum of X*^T X* (d x d, entries of variance 1/n), i.e. Marchenko-Pastur at
/// ratio phi, with its atom at 0 when phi > 1.
SpectralDensity signal_spectrum(double phi, int points = 4001);

std::string density_csv(const SpectralDensity& density);
std::string edge_report_json(const EdgeReport& report);

}  // namespace psdflow::spectral
