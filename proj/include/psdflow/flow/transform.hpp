#pragma once

#include <complex>
#include <limits>
#include <optional>
#include <vector>

#include "psdflow/fixed_point.hpp"
#include "psdflow/flow/contour.hpp"
#include "psdflow/params.hpp"
#include "psdflow/spectral/density.hpp"

namespace psdflow::flow {

/// h_t(z) = (1/n) Tr (Z_t - z)^{-1} and the auxiliary h_tilde_t(z) at one point.
struct TransformEval {
  cplx z{};
  cplx h{};
  cplx h_tilde{};
  double t = 0.0;
  int iterations = 0;
  double residual = 0.0;  ///< |h_tilde - G(h_tilde)| / |G(h_tilde)|
  /// max |h_contour - h_real| (NaN when the contour route was skipped)
  double contour_deviation = std::numeric_limits<double>::quiet_NaN();
  /// Half height of the rectangle actually used (NaN when skipped or for a circle).
  double contour_half_height = std::numeric_limits<double>::quiet_NaN();
};

enum class ContourCheck { enforce, skip };

/// Solver for h_t at a fixed time. With T(x) = e^{2tx} - z L_t(x):
///   h_tilde = 1 / (1 + int rho_P(x) / (psi h_tilde - z/T(x)))
///   h = -(1 - psi)/z - psi h_tilde / z + psi h_tilde int rho_P(x) (L_t/T)(x) / (psi h_tilde - z/T(x))
/// The first term of h is the rank atom of Z_t at 0.
///
/// Integrals are taken on the real line against rho_P; with ContourCheck::enforce they are
/// also taken on the contour as (-1/2 pi i) closed integral of f(x) P(x) dx, and the two
/// results must agree within `agreement`.
///
/// The contour form is only valid while psi h_tilde T(x) - z has no zero inside the contour.
/// Those zeros are counted with the argument principle at the real-line solution; a
/// rectangle holding any is replaced by successively thinner ones around the same support,
/// and ContourRealLineMismatch is thrown if none is free of them. The contour route
/// starts from the real-line solution, since the contour form can have further fixed points.
class HSolver {
 public:
  /// panel_width > 0 caps the width of the real-line panels.
  HSolver(const ModelParams& params, double t, const FixedPointConfig& cfg,
          ContourCheck check = ContourCheck::enforce, std::optional<Contour> contour = std::nullopt,
          double agreement = 1e-6, double panel_width = 0.0);

  /// Throws NonConvergence, DenominatorNearZero, ContourRealLineMismatch.
  TransformEval operator()(cplx z) const;

  double t() const { return t_; }
  const ModelParams& params() const { return params_; }
  std::size_t real_nodes() const { return real_.w_re.size(); }
  std::size_t contour_nodes() const { return base_.w_re.size(); }

 private:
  struct Solved {
    cplx h_tilde, h;
    int iterations;
    double residual;
  };
  struct Nodes {
    std::vector<double> w_re, w_im;
    std::vector<cplx> alpha, beta, gamma;
  };
  Solved solve(cplx z, const Nodes& nodes, cplx init) const;
  Nodes make_nodes(const Contour& path) const;
  int enclosed_zeros(const Nodes& path_nodes, const Contour& path, cplx z, cplx c) const;

  ModelParams params_;
  double t_;
  FixedPointConfig cfg_;
  ContourCheck check_;
  double agreement_;
  Nodes real_;
  std::optional<Contour> path_;
  Nodes base_;
};

TransformEval eval_h(const ModelParams& params, double t, cplx z, const FixedPointConfig& cfg,
                     const Contour& contour);
/// Default contour: rectangle around supp rho_P, margin 0.2, 512 nodes.
TransformEval eval_h(const ModelParams& params, double t, cplx z, const FixedPointConfig& cfg = {});

/// Radius 2 B + 1 with B = max((1 + sqrt psi)^2, upper edge of rho_P, 0).
double moment_radius(const ModelParams& params);

struct MomentReport {
  double m0 = 0.0, m1 = 0.0, m2 = 0.0;
  double p = 0.0;
  double radius = 0.0;
  int nodes = 0;
};

/// m_k = -(1/2 pi i) closed integral of z^k h_t(z) dz on |z| = radius (trapezoid, `nodes`
/// points, conjugate symmetry), p = m2 / phi. radius <= 0 selects moment_radius().
MomentReport eval_moments(const ModelParams& params, double t, const FixedPointConfig& cfg = {},
                          int nodes = 64, double radius = 0.0);

/// p_t from eval_moments; throws MomentSanityFailure if |m0 - 1| > 1e-4.
double eval_p(const ModelParams& params, double t, const FixedPointConfig& cfg = {});

/// Diagnostic: p_t = -(1/2 phi) g''(0) with g(w) = h_t(1/w)/w by central differences.
double eval_p_finite_difference(const ModelParams& params, double t,
                                const FixedPointConfig& cfg = {}, double step = 1e-3);

inline constexpr double kZDensityEpsilon = 1e-2;
inline constexpr double kMinZDensityEpsilon = 1e-3;

/// rho_{Z_t} on a grid from Im h_t(x + i eps)/pi (eps -> 0 extrapolated from eps, eps/2),
/// with the rank atom max(0, 1 - psi) at 0 split off analytically. The integrand has a
/// pole within O(eps) of the real line, so the real-line rule is refined to panels of
/// width eps/2 and eps must be at least kMinZDensityEpsilon; kZDensityEpsilon is the
/// usual choice (error O(eps^2)).
spectral::SpectralDensity z_density(const ModelParams& params, double t,
                                    const spectral::GridSpec& grid,
                                    const FixedPointConfig& cfg = {});

}  // namespace psdflow::flow
