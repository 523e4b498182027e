#pragma once

#include <Eigen/Dense>

#include "psdflow/simulate/config.hpp"

namespace psdflow::simulate {

/// One realization of the denoising problem.
struct Instance {
  Eigen::MatrixXd x_star;  ///< n x d signal factor
  Eigen::MatrixXd xi;      ///< n x n symmetric noise
  Eigen::MatrixXd x0;      ///< n x m initial condition
  Eigen::MatrixXd y;       ///< X* X*^T + xi / sqrt(lambda)
  Eigen::MatrixXd h;       ///< Y - mu I
  double mu = 0.0;

  int n() const { return static_cast<int>(x_star.rows()); }
  int d() const { return static_cast<int>(x_star.cols()); }
  int m() const { return static_cast<int>(x0.cols()); }

  Eigen::MatrixXd z_star() const { return x_star * x_star.transpose(); }
  /// (1/d) Tr[(Z*)^2] of the realized signal.
  double r_emp() const;
};

/// Entries of X*, X0 and xi drawn from N(0, 1/n). Each matrix has its own generator
/// keyed by (seed, trial, role), so an instance does not depend on scheduling.
Instance sample_instance(const SimConfig& cfg, int trial);

/// H in its eigenbasis, with X* and X0 rotated into it.
struct EigenFrame {
  Eigen::VectorXd values;   ///< ascending eigenvalues of H
  Eigen::MatrixXd vectors;  ///< V with H = V diag(values) V^T
  Eigen::MatrixXd x_star;   ///< V^T X*
  Eigen::MatrixXd x0;       ///< V^T X0
  double y_norm2 = 0.0;     ///< |Y|_F^2
  double mu = 0.0;
  double r_emp = 0.0;

  int d() const { return static_cast<int>(x_star.cols()); }
  double max_abs_eigenvalue() const;
};

EigenFrame eigen_frame(const Instance& inst);

}  // namespace psdflow::simulate
