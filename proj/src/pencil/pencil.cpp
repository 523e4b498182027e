#include "psdflow/pencil/pencil.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "psdflow/errors.hpp"

namespace psdflow::pencil {

namespace {

constexpr double kSingularRcond = 1e-13;

double max_abs(const CMatrix& m) { return m.size() ? m.cwiseAbs().maxCoeff() : 0.0; }

double reciprocal_condition(const Eigen::PartialPivLU<CMatrix>& lu) {
  const Eigen::VectorXd pivots = lu.matrixLU().diagonal().cwiseAbs();
  if (!(pivots.minCoeff() > kSingularRcond * pivots.maxCoeff())) return 0.0;
  return lu.rcond();
}

bool same_dim(const PencilSpec& spec, int i, int j) {
  return std::abs(spec.dims[static_cast<std::size_t>(i)] - spec.dims[static_cast<std::size_t>(j)]) <=
         1e-12 * std::max(spec.dims[static_cast<std::size_t>(i)], spec.dims[static_cast<std::size_t>(j)]);
}

}  // namespace

CMatrix PencilSpec::eta_of(const CMatrix& g) const {
  CMatrix out = CMatrix::Zero(k(), k());
  for (const auto& t : eta) out(t.row, t.col) += t.coeff * g(t.src_row, t.src_col);
  return out;
}

void PencilSpec::validate() const {
  const int n = k();
  if (n < 1) throw ValidationError("pencil needs at least one block");
  for (double d : dims) {
    if (!(d > 0.0) || !std::isfinite(d)) throw ValidationError("pencil block dimensions must be > 0");
  }
  if (c.rows() != n || c.cols() != n) throw ValidationError("pencil constant must be k x k");
  if (!c.allFinite()) throw ValidationError("pencil constant must be finite");
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) {
      if (c(i, j) != cplx(0.0) && !same_dim(*this, i, j)) {
        throw ValidationError("constant couples blocks " + std::to_string(i + 1) + " and " +
                              std::to_string(j + 1) + " of different dimension");
      }
    }
  }
  for (const auto& t : eta) {
    for (int idx : {t.row, t.col, t.src_row, t.src_col}) {
      if (idx < 0 || idx >= n) throw ValidationError("eta index out of range");
    }
    if (!same_dim(*this, t.row, t.col)) {
      throw ValidationError("eta couples blocks " + std::to_string(t.row + 1) + " and " +
                            std::to_string(t.col + 1) + " of different dimension");
    }
  }
  Eigen::PartialPivLU<CMatrix> lu(c);
  if (!(reciprocal_condition(lu) > kSingularRcond)) throw ValidationError("C - eta(0) is singular");
}

CMatrix blocktrace_inverse(const PencilSpec& spec, const CMatrix& eta) {
  // With couplings confined to blocks of equal dimension the expanded operator splits
  // into scalar classes, and every nonzero trace factor min(N_i, N_j) / N_i is one.
  const CMatrix a = spec.c - eta;
  if (!a.allFinite()) throw SingularIterate("C - eta(g) is not finite");
  Eigen::PartialPivLU<CMatrix> lu(a);
  const double rc = reciprocal_condition(lu);
  if (!(rc > kSingularRcond)) {
    throw SingularIterate("C - eta(g) has reciprocal condition " + std::to_string(rc));
  }
  return lu.inverse();
}

PencilSolution solve_pencil(const PencilSpec& spec, const FixedPointConfig& cfg,
                            const std::optional<CMatrix>& init) {
  spec.validate();
  cfg.validate();
  const int k = spec.k();
  PencilSolution out;
  CMatrix g = init ? *init : blocktrace_inverse(spec, CMatrix::Zero(k, k));
  if (g.rows() != k || g.cols() != k) throw ValidationError("initial g must be k x k");

  auto residual_map = [&](const CMatrix& x) -> CMatrix { return x - blocktrace_inverse(spec, spec.eta_of(x)); };

  for (int it = 1; it <= cfg.max_iter; ++it) {
    const CMatrix next = blocktrace_inverse(spec, spec.eta_of(g));
    const double step = max_abs(next - g);
    out.iterations = it;
    if (step < cfg.tol) {
      out.g = next;
      out.residual = max_abs(residual_map(next));
      return out;
    }
    g = (1.0 - cfg.damping) * g + cfg.damping * next;
  }
  if (cfg.restart != RestartPolicy::newton) {
    throw NonConvergence("pencil Picard iteration did not converge in " + std::to_string(cfg.max_iter) +
                         " iterations");
  }

  // Newton on F(g) = g - (C - eta(g))^{-1}; dF[E] = E - G eta(E) G.
  out.newton_used = true;
  const int kk = k * k;
  CMatrix f = residual_map(g);
  for (int it = 0; it < cfg.newton_max_iter; ++it) {
    const double norm = max_abs(f);
    if (norm < cfg.tol) {
      out.g = g;
      out.residual = norm;
      return out;
    }
    const CMatrix inv = blocktrace_inverse(spec, spec.eta_of(g));
    Eigen::MatrixXcd jac(kk, kk);
    for (int b = 0; b < k; ++b) {
      for (int a = 0; a < k; ++a) {
        CMatrix e = CMatrix::Zero(k, k);
        e(a, b) = 1.0;
        const CMatrix col = e - inv * spec.eta_of(e) * inv;
        jac.col(a + b * k) = Eigen::Map<const Eigen::VectorXcd>(col.data(), kk);
      }
    }
    const Eigen::VectorXcd rhs = -Eigen::Map<const Eigen::VectorXcd>(f.data(), kk);
    const Eigen::VectorXcd delta = jac.fullPivLu().solve(rhs);
    const CMatrix step = Eigen::Map<const CMatrix>(delta.data(), k, k);
    double scale = 1.0;
    bool moved = false;
    for (int back = 0; back < 30; ++back, scale *= 0.5) {
      try {
        const CMatrix trial = g + scale * step;
        const CMatrix ft = residual_map(trial);
        if (max_abs(ft) < norm) {
          g = trial;
          f = ft;
          moved = true;
          break;
        }
      } catch (const SingularIterate&) {
      }
    }
    if (!moved) break;
    ++out.iterations;
  }
  throw NonConvergence("pencil Newton restart stalled at residual " + std::to_string(max_abs(f)));
}

PencilSpec mz_spec(const ModelParams& params, cplx z) {
  const double phi = params.phi();
  PencilSpec spec;
  spec.dims = {1.0, phi, 1.0, phi};
  spec.c = CMatrix::Identity(4, 4);
  spec.c(2, 2) = z + params.mu();
  spec.eta = {
      {0, 2, 1, 1, phi},
      {0, 2, 1, 3, phi},
      {1, 1, 2, 0, 1.0},
      {1, 3, 2, 2, 1.0},
      {2, 2, 2, 2, 1.0 / params.lambda()},
      {2, 2, 3, 1, phi},
      {2, 2, 3, 3, phi},
      {3, 1, 2, 0, 1.0},
      {3, 3, 2, 2, 1.0},
  };
  return spec;
}

}  // namespace psdflow::pencil
