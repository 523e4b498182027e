#include "psdflow/spectral/stieltjes.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "psdflow/errors.hpp"

namespace psdflow::spectral {

const char* kind_name(TransformKind kind) { return kind == TransformKind::P ? "P" : "Q"; }

Cubic transform_cubic(TransformKind kind, const ModelParams& params, cplx z) {
  const double phi = params.phi();
  const double lambda = params.lambda();
  const double mu = params.mu();
  if (kind == TransformKind::P) {
    // P^3 + P^2 (lambda (mu + z) + 1) + P lambda (mu + z - phi + 1) + lambda = 0
    return {1.0, lambda * (mu + z) + 1.0, lambda * (mu + z - phi + 1.0), lambda};
  }
  // phi Q^3 + Q^2 (mu + z - 2 phi - 1 - 1/lambda) - Q (mu + z - phi - 2) - 1 = 0
  return {phi, mu + z - 2.0 * phi - 1.0 - 1.0 / lambda, -(mu + z - phi - 2.0), -1.0};
}

double discriminant_P(const ModelParams& params, double z) {
  const double lambda = params.lambda();
  const double w = params.mu() + z;
  return discriminant(1.0, lambda * w + 1.0, lambda * (w - params.phi() + 1.0), lambda);
}

cplx track_branch(const std::function<std::vector<cplx>(cplx)>& roots_of, cplx target) {
  const double x = target.real();
  const double y_target = std::max(target.imag(), 0.0);
  const double y_anchor = std::max(1e6, 1e3 * (1.0 + std::abs(target)));
  const double y_end = y_target > 0.0 ? y_target : 1e-13 * (1.0 + std::abs(x));

  auto nearest = [](const std::vector<cplx>& roots, cplx ref, double* second) {
    double best = std::numeric_limits<double>::infinity();
    double next = best;
    cplx pick = roots.front();
    for (const auto& r : roots) {
      const double dist = std::abs(r - ref);
      if (dist < best) {
        next = best;
        best = dist;
        pick = r;
      } else if (dist < next) {
        next = dist;
      }
    }
    if (second) *second = next;
    return pick;
  };

  cplx z(x, y_anchor);
  cplx current = nearest(roots_of(z), -1.0 / z, nullptr);
  if (std::abs(-z * current - 1.0) > 1e-2) {
    throw NoHerglotzRoot("anchor root not identified at |z| = " + std::to_string(std::abs(z)));
  }

  double y = y_anchor;
  double ratio = 0.7;
  int steps = 0;
  while (y > y_end) {
    if (++steps > 20000) throw ConvergenceError("branch continuation did not reach target");
    const double y_next = std::max(y * ratio, y_end);
    double second = 0.0;
    const auto roots = roots_of(cplx(x, y_next));
    const cplx pick = nearest(roots, current, &second);
    const double first = std::abs(pick - current);
    if (second < 3.0 * first && ratio < 0.999) {
      ratio = std::sqrt(ratio);
      continue;
    }
    current = pick;
    y = y_next;
    ratio = std::max(ratio * ratio, 0.5);
  }
  if (y_target == 0.0) current = nearest(roots_of(cplx(x, 0.0)), current, nullptr);
  return current;
}

namespace {

std::vector<cplx> roots_vector(TransformKind kind, const ModelParams& params, cplx z) {
  const auto r = cubic_roots(transform_cubic(kind, params, z));
  return {r[0], r[1], r[2]};
}

double clear_margin(cplx r) { return 1e-11 * (1.0 + std::abs(r)); }

}  // namespace

cplx solve_cubic_branch(TransformKind kind, const ModelParams& params, cplx z) {
  if (!(std::isfinite(z.real()) && std::isfinite(z.imag()))) {
    throw ValidationError("spectral argument must be finite");
  }
  if (z.imag() < 0.0) return std::conj(solve_cubic_branch(kind, params, std::conj(z)));

  const auto roots_fn = [&](cplx w) { return roots_vector(kind, params, w); };
  const auto roots = cubic_roots(transform_cubic(kind, params, z));

  if (z.imag() > 0.0) {
    int positive = 0;
    int clear = 0;
    cplx pick;
    for (const auto& r : roots) {
      if (r.imag() > 0.0) ++positive;
      if (r.imag() > clear_margin(r)) {
        ++clear;
        pick = r;
      }
    }
    if (!(positive == 1 && clear == 1)) pick = track_branch(roots_fn, z);
    if (pick.imag() < -clear_margin(pick)) {
      throw NoHerglotzRoot(std::string(kind_name(kind)) + " root in lower half-plane at z = (" +
                           std::to_string(z.real()) + ", " + std::to_string(z.imag()) + ")");
    }
    return pick;
  }

  // Real axis: coefficients are real here.
  const Cubic c = transform_cubic(kind, params, z);
  const double disc =
      discriminant(c.c3.real(), c.c2.real(), c.c1.real(), c.c0.real());
  if (disc < 0.0) {
    return *std::max_element(roots.begin(), roots.end(),
                             [](cplx a, cplx b) { return a.imag() < b.imag(); });
  }
  return cplx(track_branch(roots_fn, z).real(), 0.0);
}

std::size_t StieltjesFn::Hash::operator()(const cplx& z) const noexcept {
  const std::size_t a = std::hash<double>{}(z.real());
  const std::size_t b = std::hash<double>{}(z.imag());
  return a ^ (b + 0x9e3779b97f4a7c15ULL + (a << 6) + (a >> 2));
}

cplx StieltjesFn::operator()(cplx z) const {
  {
    std::lock_guard<std::mutex> lock(mutex_);
    if (auto it = cache_.find(z); it != cache_.end()) return it->second;
  }
  const cplx value = solve_cubic_branch(kind_, params_, z);
  std::lock_guard<std::mutex> lock(mutex_);
  cache_.emplace(z, value);
  return value;
}

std::size_t StieltjesFn::cache_size() const {
  std::lock_guard<std::mutex> lock(mutex_);
  return cache_.size();
}

}  // namespace psdflow::spectral
