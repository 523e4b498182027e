#pragma once

#include <Eigen/Dense>
#include <span>
#include <vector>

#include "psdflow/simulate/config.hpp"
#include "psdflow/simulate/instance.hpp"

namespace psdflow::simulate {

struct Observables {
  double t = 0.0;
  double q = 0.0;          ///< (1/d) Tr[Z* Z]
  double p = 0.0;          ///< (1/d) Tr[Z^2]
  double mse = 0.0;        ///< r_emp - 2 q + p
  double objective = 0.0;  ///< (1/4d) |Y - Z|_F^2 + (mu/2d) Tr Z
};

struct TrialRecord {
  int trial = 0;
  std::vector<Observables> rows;
  double final_x_norm = 0.0;  ///< |X|_F = sqrt(Tr Z) at the last recorded time
};

/// Observables of a dense Z.
Observables observe(const Instance& inst, const Eigen::MatrixXd& z, double t);

/// Observables of Z = V A A^T V^T from a factor A given in the eigenbasis.
Observables observe_factor(const EigenFrame& frame, const Eigen::MatrixXd& a, double t);

/// (1/4d) |Y - X X^T|_F^2 + (mu/2d) |X|_F^2.
double objective(const Instance& inst, const Eigen::MatrixXd& x);

/// Largest dt accepted by run_gradient_descent: 0.5 / max(|eig H|, 1).
double stable_step(const EigenFrame& frame);

/// X <- X + dt (H - X X^T) X, run in the eigenbasis of H. Records at the iterate
/// nearest to each record time; the reported t is iteration x dt.
/// Throws ValidationError if dt exceeds stable_step, Divergence if |X|_F > 1e6.
TrialRecord run_gradient_descent(const SimConfig& cfg, const Instance& inst, int trial = 0);
TrialRecord run_gradient_descent(const SimConfig& cfg, const EigenFrame& frame, int trial = 0);

/// Advances the factor A (Z = A A^T in the eigenbasis) by time s along the Riccati flow:
/// A <- e^{s Lambda} A R^{-1} with R^T R = I + A^T L_s(Lambda) A, L_s(h) = (e^{2sh} - 1)/h.
/// Long intervals are split into segments with s max(h_max, 0) <= 4.
/// Throws InnerSolveFailure if the m x m factorization fails.
void advance_factor(const Eigen::VectorXd& values, Eigen::MatrixXd& a, double s);

/// Z_t = e^{tH} X0 (I + X0^T L_t(H) X0)^{-1} X0^T e^{tH}.
Eigen::MatrixXd closed_form_Z(const Instance& inst, double t);
Eigen::MatrixXd closed_form_Z(const EigenFrame& frame, double t);

TrialRecord run_closed_form(const SimConfig& cfg, const EigenFrame& frame, int trial = 0);

/// Classical RK4 on dZ/dt = HZ + ZH - 2Z^2 from z0 over [0, t] with steps of at most dt.
Eigen::MatrixXd rk4_riccati(const Eigen::MatrixXd& h, Eigen::MatrixXd z0, double t, double dt);

TrialRecord run_rk4(const SimConfig& cfg, const Instance& inst, int trial = 0);

/// Dispatches on cfg.integrator.
TrialRecord run_trial(const SimConfig& cfg, const Instance& inst, int trial);

/// Eigenvalues of H, overlaps w_i = |X*^T v_i|^2 / d, eigenvalues of Z_t at each time.
struct EmpiricalSpectra {
  Eigen::VectorXd h_values;
  Eigen::VectorXd weights;
  std::vector<double> times;
  std::vector<Eigen::VectorXd> z_values;
};

EmpiricalSpectra empirical_densities(const Instance& inst, std::span<const double> times = {});

}  // namespace psdflow::simulate
