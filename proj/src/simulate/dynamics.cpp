#include "psdflow/simulate/dynamics.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "psdflow/errors.hpp"
#include "psdflow/simulate/linalg.hpp"

namespace psdflow::simulate {

namespace {

constexpr double kDivergenceNorm = 1e6;

double integrated_exp(double s, double lam) {
  if (std::abs(lam) < 1e-8) return 2.0 * s + 2.0 * s * s * lam;
  return std::expm1(2.0 * s * lam) / lam;
}

Observables finish(double t, double q, double p, double r_emp, double objective) {
  return {t, q, p, r_emp - 2.0 * q + p, objective};
}

}  // namespace

Observables observe(const Instance& inst, const Eigen::MatrixXd& z, double t) {
  const double d = inst.d();
  const double q = (inst.z_star().array() * z.array()).sum() / d;
  const double p = z.squaredNorm() / d;
  const double obj = (inst.y - z).squaredNorm() / (4.0 * d) + inst.mu * z.trace() / (2.0 * d);
  return finish(t, q, p, inst.r_emp(), obj);
}

Observables observe_factor(const EigenFrame& frame, const Eigen::MatrixXd& a, double t) {
  const double d = frame.d();
  const double q = (frame.x_star.transpose() * a).squaredNorm() / d;
  const Eigen::MatrixXd gram = a.transpose() * a;
  const double p = gram.squaredNorm() / d;
  const Eigen::VectorXd rows = a.rowwise().squaredNorm();
  const double tr_z = rows.sum();
  const double tr_yz = (frame.values.array() + frame.mu).matrix().dot(rows);
  const double obj = (frame.y_norm2 - 2.0 * tr_yz + p * d) / (4.0 * d) + frame.mu * tr_z / (2.0 * d);
  return finish(t, q, p, frame.r_emp, obj);
}

double objective(const Instance& inst, const Eigen::MatrixXd& x) {
  const double d = inst.d();
  return (inst.y - x * x.transpose()).squaredNorm() / (4.0 * d) + inst.mu * x.squaredNorm() / (2.0 * d);
}

double stable_step(const EigenFrame& frame) { return 0.5 / std::max(frame.max_abs_eigenvalue(), 1.0); }

TrialRecord run_gradient_descent(const SimConfig& cfg, const Instance& inst, int trial) {
  return run_gradient_descent(cfg, eigen_frame(inst), trial);
}

TrialRecord run_gradient_descent(const SimConfig& cfg, const EigenFrame& frame, int trial) {
  cfg.validate();
  const double guard = stable_step(frame);
  if (cfg.dt > guard) {
    throw ValidationError("dt " + std::to_string(cfg.dt) + " exceeds the stability bound " +
                          std::to_string(guard));
  }
  std::vector<long> marks;
  for (double t : cfg.record_times) marks.push_back(std::lround(t / cfg.dt));

  TrialRecord rec;
  rec.trial = trial;
  Eigen::MatrixXd x = frame.x0;
  Eigen::MatrixXd gram(x.cols(), x.cols());
  Eigen::MatrixXd cubic(x.rows(), x.cols());
  std::size_t next = 0;
  for (long k = 0; next < marks.size(); ++k) {
    while (next < marks.size() && marks[next] == k) {
      rec.rows.push_back(observe_factor(frame, x, static_cast<double>(k) * cfg.dt));
      ++next;
    }
    if (next == marks.size()) break;
    gram.noalias() = x.transpose() * x;
    cubic.noalias() = x * gram;
    x += cfg.dt * (frame.values.asDiagonal() * x - cubic);
    const double norm = x.norm();
    if (!(norm <= kDivergenceNorm)) {
      throw Divergence("|X|_F = " + std::to_string(norm) + " at t = " +
                       std::to_string(static_cast<double>(k + 1) * cfg.dt) + "; reduce dt");
    }
  }
  rec.final_x_norm = x.norm();
  return rec;
}

void advance_factor(const Eigen::VectorXd& values, Eigen::MatrixXd& a, double s) {
  if (!(s >= 0.0)) throw ValidationError("flow time must be >= 0");
  if (s == 0.0 || a.size() == 0) return;
  const double growth_rate = values.size() ? std::max(values.maxCoeff(), 0.0) : 0.0;
  const long segments = std::max(1L, static_cast<long>(std::ceil(s * growth_rate / 4.0)));
  const double step = s / static_cast<double>(segments);
  Eigen::VectorXd growth(values.size()), weight(values.size());
  for (Eigen::Index i = 0; i < values.size(); ++i) {
    growth(i) = std::exp(step * values(i));
    weight(i) = integrated_exp(step, values(i));
  }
  const Eigen::Index m = a.cols();
  Eigen::MatrixXd inner(m, m);
  for (long k = 0; k < segments; ++k) {
    inner.noalias() = a.transpose() * weight.asDiagonal() * a;
    inner.diagonal().array() += 1.0;
    Eigen::LLT<Eigen::MatrixXd> llt(inner);
    if (llt.info() != Eigen::Success) {
      throw InnerSolveFailure("I + X^T L X is not positive definite");
    }
    a = growth.asDiagonal() * a;
    llt.matrixU().solveInPlace<Eigen::OnTheRight>(a);
  }
}

Eigen::MatrixXd closed_form_Z(const Instance& inst, double t) { return closed_form_Z(eigen_frame(inst), t); }

Eigen::MatrixXd closed_form_Z(const EigenFrame& frame, double t) {
  Eigen::MatrixXd a = frame.x0;
  advance_factor(frame.values, a, t);
  const Eigen::MatrixXd b = frame.vectors * a;
  Eigen::MatrixXd z = b * b.transpose();
  return 0.5 * (z + z.transpose());
}

TrialRecord run_closed_form(const SimConfig& cfg, const EigenFrame& frame, int trial) {
  cfg.validate();
  TrialRecord rec;
  rec.trial = trial;
  Eigen::MatrixXd a = frame.x0;
  double now = 0.0;
  for (double t : cfg.record_times) {
    advance_factor(frame.values, a, t - now);
    now = t;
    rec.rows.push_back(observe_factor(frame, a, t));
  }
  rec.final_x_norm = a.norm();
  return rec;
}

Eigen::MatrixXd rk4_riccati(const Eigen::MatrixXd& h, Eigen::MatrixXd z, double t, double dt) {
  if (!(t >= 0.0)) throw ValidationError("integration time must be >= 0");
  if (!(dt > 0.0)) throw ValidationError("dt must be > 0");
  if (t == 0.0) return z;
  const long steps = std::max(1L, static_cast<long>(std::ceil(t / dt - 1e-9)));
  const double s = t / static_cast<double>(steps);
  auto f = [&h](const Eigen::MatrixXd& w) -> Eigen::MatrixXd {
    const Eigen::MatrixXd hw = h * w;
    return hw + hw.transpose() - 2.0 * w * w;
  };
  for (long k = 0; k < steps; ++k) {
    const Eigen::MatrixXd k1 = f(z);
    const Eigen::MatrixXd k2 = f(z + 0.5 * s * k1);
    const Eigen::MatrixXd k3 = f(z + 0.5 * s * k2);
    const Eigen::MatrixXd k4 = f(z + s * k3);
    z += (s / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
  }
  return z;
}

TrialRecord run_rk4(const SimConfig& cfg, const Instance& inst, int trial) {
  cfg.validate();
  TrialRecord rec;
  rec.trial = trial;
  Eigen::MatrixXd z = inst.x0 * inst.x0.transpose();
  double now = 0.0;
  for (double t : cfg.record_times) {
    z = rk4_riccati(inst.h, std::move(z), t - now, cfg.dt);
    now = t;
    rec.rows.push_back(observe(inst, z, t));
  }
  rec.final_x_norm = std::sqrt(std::max(z.trace(), 0.0));
  return rec;
}

TrialRecord run_trial(const SimConfig& cfg, const Instance& inst, int trial) {
  switch (cfg.integrator) {
    case Integrator::euler_gd:
      return run_gradient_descent(cfg, inst, trial);
    case Integrator::rk4_ode:
      return run_rk4(cfg, inst, trial);
    case Integrator::closed_form:
      return run_closed_form(cfg, eigen_frame(inst), trial);
  }
  throw ValidationError("unknown integrator");
}

EmpiricalSpectra empirical_densities(const Instance& inst, std::span<const double> times) {
  const auto frame = eigen_frame(inst);
  EmpiricalSpectra out;
  out.h_values = frame.values;
  out.weights = frame.x_star.rowwise().squaredNorm() / static_cast<double>(frame.d());
  for (double t : times) {
    out.times.push_back(t);
    out.z_values.push_back(symmetric_eigenvalues(closed_form_Z(frame, t)));
  }
  return out;
}

}  // namespace psdflow::simulate
