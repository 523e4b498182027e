#include "psdflow/flow/transform.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

#include "integrands.hpp"
#include "psdflow/errors.hpp"
#include "psdflow/kernels.hpp"
#include "psdflow/parallel.hpp"
#include "psdflow/spectral/measure.hpp"
#include "psdflow/spectral/stieltjes.hpp"

namespace psdflow::flow {

namespace {

std::string point(cplx z) {
  return "(" + std::to_string(z.real()) + ", " + std::to_string(z.imag()) + ")";
}

}  // namespace

HSolver::HSolver(const ModelParams& params, double t, const FixedPointConfig& cfg,
                 ContourCheck check, std::optional<Contour> contour, double agreement,
                 double panel_width)
    : params_(params), t_(t), cfg_(cfg), check_(check), agreement_(agreement) {
  cfg_.validate();
  if (!(t >= 0.0) || !std::isfinite(t)) throw ValidationError("time must be finite and >= 0");
  const spectral::SpectralMeasure rho_p(spectral::TransformKind::P, params);
  const double width = rho_p.upper_edge() - rho_p.lower_edge();
  double max_width = width / 16.0;
  if (t > 0.0) max_width = std::min(max_width, 0.25 / t);
  if (panel_width > 0.0) max_width = std::min(max_width, panel_width);
  const double breaks[] = {0.0};
  const auto rule = rho_p.rule(max_width, breaks);
  real_.w_re = rule.w;
  real_.w_im.assign(rule.w.size(), 0.0);
  for (double x : rule.x) {
    const auto terms = detail::h_terms<cplx>(cplx(x, 0.0), t);
    real_.alpha.push_back(terms.alpha);
    real_.beta.push_back(terms.beta);
    real_.gamma.push_back(terms.gamma);
  }

  if (check_ == ContourCheck::enforce) {
    path_ = contour ? *contour : Contour::around_support(params);
    for (const auto& s : rho_p.support()) {
      if (!path_->encloses(s, 0.1)) throw ValidationError("contour does not enclose supp rho_P");
    }
    base_ = make_nodes(*path_);
  }
}

HSolver::Nodes HSolver::make_nodes(const Contour& path) const {
  const spectral::StieltjesFn p_of(spectral::TransformKind::P, params_);
  const cplx factor = -1.0 / (2.0 * std::numbers::pi * cplx(0.0, 1.0));
  Nodes out;
  for (std::size_t k = 0; k < path.size(); ++k) {
    const cplx x = path.nodes[k];
    const cplx w = factor * path.dz[k] * p_of(x);
    out.w_re.push_back(w.real());
    out.w_im.push_back(w.imag());
    const auto terms = detail::h_terms<cplx>(x, t_);
    out.alpha.push_back(terms.alpha);
    out.beta.push_back(terms.beta);
    out.gamma.push_back(terms.gamma);
  }
  return out;
}

int HSolver::enclosed_zeros(const Nodes& nodes, const Contour& path, cplx z, cplx c) const {
  // c T(x) - z = (c (beta - z gamma) - z alpha) / alpha, continuous along the path
  const std::size_t n = path.size();
  auto arg = [&](std::size_t k) {
    const cplx num = c * (nodes.beta[k] - z * nodes.gamma[k]) - z * nodes.alpha[k];
    return std::arg(num) - std::arg(nodes.alpha[k]);
  };
  double total = 0.0;
  double prev = arg(n - 1);
  for (std::size_t k = 0; k < n; ++k) {
    const double cur = arg(k);
    total += std::remainder(cur - prev, 2.0 * std::numbers::pi);
    prev = cur;
  }
  return static_cast<int>(std::lround(total / (2.0 * std::numbers::pi)));
}

HSolver::Solved HSolver::solve(cplx z, const Nodes& nodes, cplx init) const {
  const std::size_t n = nodes.w_re.size();
  const double psi = params_.psi();
  std::vector<double> b_re(n), b_im(n), v_re(n), v_im(n);
  for (std::size_t i = 0; i < n; ++i) {
    const cplx den = nodes.beta[i] - z * nodes.gamma[i];
    const cplx b = z * nodes.alpha[i] / den;
    const cplx v = cplx(nodes.w_re[i], nodes.w_im[i]) * nodes.gamma[i] / den;
    b_re[i] = b.real();
    b_im[i] = b.imag();
    v_re[i] = v.real();
    v_im[i] = v.imag();
  }
  const kernels::ComplexSpan w{nodes.w_re, nodes.w_im};
  const kernels::ComplexSpan b{b_re, b_im};
  const kernels::ComplexSpan v{v_re, v_im};

  Solved out{init, {}, 0, 0.0};
  cplx ht = init;
  bool done = false;
  for (int it = 0; it < cfg_.max_iter; ++it) {
    const cplx s = kernels::pole_sums(w, b, psi * ht).first;
    const cplx target = 1.0 / (1.0 + s);
    out.residual = std::abs(ht - target) / std::abs(target);
    out.iterations = it + 1;
    if (!std::isfinite(out.residual)) break;
    if (out.residual <= cfg_.tol) {
      done = true;
      break;
    }
    ht = (1.0 - cfg_.damping) * ht + cfg_.damping * target;
  }
  if (!done && cfg_.restart == RestartPolicy::newton) {
    if (!(std::isfinite(std::abs(ht)) && std::abs(ht) > 0.0)) ht = init;
    for (int it = 0; it < cfg_.newton_max_iter; ++it) {
      const auto sums = kernels::pole_sums(w, b, psi * ht);
      const cplx f = ht * (1.0 + sums.first) - 1.0;
      const cplx target = 1.0 / (1.0 + sums.first);
      out.residual = std::abs(ht - target) / std::abs(target);
      ++out.iterations;
      if (out.residual <= cfg_.tol) {
        done = true;
        break;
      }
      // Newton in log h_tilde: h_tilde decays like e^{-2 alpha t}
      const cplx df = ht * (1.0 + sums.first - psi * ht * sums.second);
      cplx step = f / df;
      if (std::abs(step) > 20.0) step *= 20.0 / std::abs(step);
      for (int k = 0; k < 30; ++k) {
        const cplx trial = ht * std::exp(-step);
        const cplx ft = trial * (1.0 + kernels::pole_sums(w, b, psi * trial).first) - 1.0;
        if (std::isfinite(std::abs(ft)) && std::abs(ft) < std::abs(f)) break;
        step *= 0.5;
      }
      ht *= std::exp(-step);
      if (!std::isfinite(std::abs(ht))) break;
    }
  }
  if (!done) {
    throw NonConvergence("h_tilde fixed point at t = " + std::to_string(t_) + ", z = " + point(z) +
                         " (residual " + std::to_string(out.residual) + ")");
  }
  const cplx c = psi * ht;
  double nearest = HUGE_VAL;
  for (std::size_t i = 0; i < n; ++i) {
    const cplx bi(b_re[i], b_im[i]);
    nearest = std::min(nearest, std::abs(c - bi) / std::max(std::abs(c), std::abs(bi)));
  }
  if (nearest < 1e-12) {
    throw DenominatorNearZero("at t = " + std::to_string(t_) + ", z = " + point(z));
  }
  out.h_tilde = ht;
  out.h = -(1.0 - psi) / z - psi * ht / z + psi * ht * kernels::pole_sums(v, b, c).first;
  return out;
}

TransformEval HSolver::operator()(cplx z) const {
  if (z == cplx(0.0, 0.0)) throw ValidationError("h_t is evaluated off z = 0");
  const auto real = solve(z, real_, cplx(1.0, 0.0));
  TransformEval out;
  out.z = z;
  out.t = t_;
  out.h = real.h;
  out.h_tilde = real.h_tilde;
  out.iterations = real.iterations;
  out.residual = real.residual;
  if (check_ == ContourCheck::skip) return out;

  const cplx c = params_.psi() * real.h_tilde;
  Contour path = *path_;
  Nodes nodes;
  int zeros = enclosed_zeros(base_, path, z, c);
  if (zeros == 0) {
    nodes = base_;
  } else if (path.shape == Contour::Shape::rectangle) {
    const double floor = 1e-3 * path.half_width;
    while (zeros != 0 && path.half_height > floor) {
      const double h = 0.5 * path.half_height;
      const double per = 4.0 * (path.half_width + h);
      const int count = std::clamp(16 * static_cast<int>(std::ceil(per / h)),
                                   static_cast<int>(path_->size()), 1 << 15);
      path = Contour::box(path.center, path.half_width, h, count);
      nodes = make_nodes(path);
      zeros = enclosed_zeros(nodes, path, z, c);
    }
  }
  if (zeros != 0) {
    throw ContourRealLineMismatch("denominator has " + std::to_string(zeros) +
                                  " zeros inside the contour at t = " + std::to_string(t_) +
                                  ", z = " + point(z));
  }
  if (path.shape == Contour::Shape::rectangle) out.contour_half_height = path.half_height;
  const auto routed = solve(z, nodes, real.h_tilde);
  out.contour_deviation = std::max(std::abs(routed.h - real.h) / std::max(1.0, std::abs(real.h)),
                                   std::abs(routed.h_tilde - real.h_tilde));
  if (!(out.contour_deviation <= agreement_)) {
    throw ContourRealLineMismatch("deviation " + std::to_string(out.contour_deviation) +
                                  " at t = " + std::to_string(t_) + ", z = " + point(z));
  }
  return out;
}

TransformEval eval_h(const ModelParams& params, double t, cplx z, const FixedPointConfig& cfg,
                     const Contour& contour) {
  return HSolver(params, t, cfg, ContourCheck::enforce, contour)(z);
}

TransformEval eval_h(const ModelParams& params, double t, cplx z, const FixedPointConfig& cfg) {
  return HSolver(params, t, cfg, ContourCheck::enforce)(z);
}

double moment_radius(const ModelParams& params) {
  const double mp_edge = std::pow(1.0 + std::sqrt(params.psi()), 2);
  const double bound = std::max({mp_edge, spectral::upper_edge(params), 0.0});
  return 2.0 * bound + 1.0;
}

MomentReport eval_moments(const ModelParams& params, double t, const FixedPointConfig& cfg, int nodes,
                          double radius) {
  if (nodes < 4 || nodes % 2 != 0) throw ValidationError("moment nodes must be even and >= 4");
  MomentReport out;
  out.radius = radius > 0.0 ? radius : moment_radius(params);
  out.nodes = nodes;
  const HSolver solver(params, t, cfg, ContourCheck::skip);
  const int half = nodes / 2;
  std::vector<cplx> z(static_cast<std::size_t>(half)), h(z.size());
  for (int k = 0; k < half; ++k) {
    z[static_cast<std::size_t>(k)] = std::polar(out.radius, 2.0 * std::numbers::pi * (k + 0.5) / nodes);
  }
  parallel_for(z.size(), [&](std::size_t k) { h[k] = solver(z[k]).h; });
  // nodes come in conjugate pairs and h(conj z) = conj h(z)
  double m[3] = {0.0, 0.0, 0.0};
  for (std::size_t k = 0; k < z.size(); ++k) {
    cplx zk = z[k] * h[k];
    for (double& mk : m) {
      mk += zk.real();
      zk *= z[k];
    }
  }
  for (double& mk : m) mk *= -2.0 / nodes;
  out.m0 = m[0];
  out.m1 = m[1];
  out.m2 = m[2];
  out.p = out.m2 / params.phi();
  return out;
}

double eval_p(const ModelParams& params, double t, const FixedPointConfig& cfg) {
  const auto report = eval_moments(params, t, cfg);
  if (std::abs(report.m0 - 1.0) > 1e-4) {
    throw MomentSanityFailure("m0 = " + std::to_string(report.m0) + " at t = " + std::to_string(t) +
                              " (radius " + std::to_string(report.radius) + ")");
  }
  return report.p;
}

double eval_p_finite_difference(const ModelParams& params, double t, const FixedPointConfig& cfg,
                                double step) {
  if (!(step > 0.0)) throw ValidationError("finite-difference step must be positive");
  const HSolver solver(params, t, cfg, ContourCheck::skip);
  auto g = [&](double w) { return (solver(cplx(1.0 / w, 0.0)).h / w).real(); };
  const double second = (g(step) + 2.0 + g(-step)) / (step * step);
  return -second / (2.0 * params.phi());
}

spectral::SpectralDensity z_density(const ModelParams& params, double t,
                                    const spectral::GridSpec& grid, const FixedPointConfig& cfg) {
  const auto x = grid.abscissae();
  if (grid.epsilon < kMinZDensityEpsilon) {
    throw ValidationError("Z_t density offset must be >= " + std::to_string(kMinZDensityEpsilon));
  }
  const HSolver solver(params, t, cfg, ContourCheck::skip, std::nullopt, 1e-6, 0.5 * grid.epsilon);
  const double atom = std::max(0.0, 1.0 - params.psi());
  auto continuous = [&](cplx z) {
    const cplx h = solver(z).h;
    return atom > 0.0 ? h + atom / z : h;
  };
  std::vector<double> values(x.size());
  parallel_for(x.size(), [&](std::size_t i) {
    const double full = continuous(cplx(x[i], grid.epsilon)).imag();
    const double half = continuous(cplx(x[i], 0.5 * grid.epsilon)).imag();
    values[i] = std::max(0.0, 2.0 * half - full) / std::numbers::pi;
  });
  return spectral::density_from_samples(x, std::move(values), atom);
}

}  // namespace psdflow::flow
