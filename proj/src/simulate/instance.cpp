#include "psdflow/simulate/instance.hpp"

#include <cmath>
#include <random>

#include "psdflow/simulate/linalg.hpp"

namespace psdflow::simulate {

namespace {

enum class Role : std::uint32_t { signal = 0, noise = 1, init = 2 };

std::mt19937_64 generator(std::uint64_t seed, int trial, Role role) {
  std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                    static_cast<std::uint32_t>(trial), static_cast<std::uint32_t>(role)};
  return std::mt19937_64(seq);
}

Eigen::MatrixXd gaussian(int rows, int cols, double sd, std::mt19937_64 gen) {
  std::normal_distribution<double> nd(0.0, sd);
  Eigen::MatrixXd out(rows, cols);
  for (int j = 0; j < cols; ++j)
    for (int i = 0; i < rows; ++i) out(i, j) = nd(gen);
  return out;
}

}  // namespace

double Instance::r_emp() const {
  const Eigen::MatrixXd g = x_star.transpose() * x_star;
  return g.squaredNorm() / d();
}

Instance sample_instance(const SimConfig& cfg, int trial) {
  cfg.validate();
  const int n = cfg.n;
  const double sd = 1.0 / std::sqrt(static_cast<double>(n));
  Instance out;
  out.mu = cfg.mu;
  out.x_star = gaussian(n, cfg.d, sd, generator(cfg.seed, trial, Role::signal));
  out.x0 = gaussian(n, cfg.m, sd, generator(cfg.seed, trial, Role::init));

  auto gen = generator(cfg.seed, trial, Role::noise);
  std::normal_distribution<double> nd(0.0, sd);
  const double diag_scale = cfg.goe_diagonal ? std::sqrt(2.0) : 1.0;
  out.xi.resize(n, n);
  for (int j = 0; j < n; ++j) {
    for (int i = 0; i < j; ++i) out.xi(i, j) = out.xi(j, i) = nd(gen);
    out.xi(j, j) = diag_scale * nd(gen);
  }

  out.y = out.x_star * out.x_star.transpose();
  if (std::isfinite(cfg.lambda)) out.y += out.xi / std::sqrt(cfg.lambda);
  out.h = out.y;
  out.h.diagonal().array() -= cfg.mu;
  return out;
}

double EigenFrame::max_abs_eigenvalue() const {
  if (values.size() == 0) return 0.0;
  return std::max(std::abs(values(0)), std::abs(values(values.size() - 1)));
}

EigenFrame eigen_frame(const Instance& inst) {
  auto eig = symmetric_eigen(inst.h);
  EigenFrame f;
  f.values = std::move(eig.values);
  f.vectors = std::move(eig.vectors);
  f.x_star = f.vectors.transpose() * inst.x_star;
  f.x0 = f.vectors.transpose() * inst.x0;
  f.y_norm2 = inst.y.squaredNorm();
  f.mu = inst.mu;
  f.r_emp = inst.r_emp();
  return f;
}

}  // namespace psdflow::simulate
