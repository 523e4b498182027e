#pragma once

#include <functional>
#include <limits>
#include <span>
#include <vector>

#include "psdflow/params.hpp"
#include "psdflow/spectral/edges.hpp"
#include "psdflow/spectral/stieltjes.hpp"

namespace psdflow::spectral {

/// Nodes x_i and weights w_i with sum_i w_i f(x_i) ~ integral of f against the measure.
struct MeasureRule {
  std::vector<double> x;
  std::vector<double> w;
  std::size_t size() const { return x.size(); }
  double mass() const;
};

/// A continuous measure on the real line with exact quadrature.
class Measure {
 public:
  virtual ~Measure() = default;

  /// Integral of f against the measure over [lower, upper].
  virtual double integrate(const std::function<double(double)>& f,
                           double lower = -std::numeric_limits<double>::infinity(),
                           double upper = std::numeric_limits<double>::infinity()) const = 0;

  double cdf(double x) const;
  /// Integral of x^k against the measure over [lower, inf), k in {0, 1, 2}.
  double moment(int k, double lower = -std::numeric_limits<double>::infinity()) const;
};

/// Absolutely continuous part of Marchenko-Pastur at ratio y (mass min(1, 1/y)).
class MarchenkoPasturMeasure : public Measure {
 public:
  explicit MarchenkoPasturMeasure(double ratio);
  double density(double x) const;
  double lower_edge() const { return lo_; }
  double upper_edge() const { return hi_; }
  double integrate(const std::function<double(double)>& f,
                   double lower = -std::numeric_limits<double>::infinity(),
                   double upper = std::numeric_limits<double>::infinity()) const override;

 private:
  double ratio_, lo_, hi_;
};

/// rho_P or rho_Q in exact form: the boundary value of the cubic branch on the real
/// axis, supported on the intervals where the discriminant is negative.
///
/// Integration substitutes x = c - r cos(theta) on every bulk, which absorbs the
/// square-root edge behaviour, and applies composite Gauss-Legendre in theta.
class SpectralMeasure : public Measure {
 public:
  SpectralMeasure(TransformKind kind, ModelParams params);

  TransformKind kind() const { return kind_; }
  const ModelParams& params() const { return params_; }
  const std::vector<Interval>& support() const { return support_; }
  double lower_edge() const { return support_.front().lo; }
  double upper_edge() const { return support_.back().hi; }

  /// rho(x) = Im(root)/pi with the root in the upper half-plane; 0 off the support.
  double density(double x) const;

  /// Rule whose panels are at most `max_width` wide in x and which splits at each
  /// breakpoint lying inside the support.
  MeasureRule rule(double max_width, std::span<const double> breakpoints = {},
                   int order = 16) const;

  double integrate(const std::function<double(double)>& f,
                   double lower = -std::numeric_limits<double>::infinity(),
                   double upper = std::numeric_limits<double>::infinity()) const override;

 private:
  TransformKind kind_;
  ModelParams params_;
  std::vector<Interval> support_;
};

}  // namespace psdflow::spectral
