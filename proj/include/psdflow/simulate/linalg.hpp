#pragma once

#include <Eigen/Dense>

namespace psdflow::simulate {

struct SymmetricEigen {
  Eigen::VectorXd values;   ///< ascending
  Eigen::MatrixXd vectors;  ///< columns are eigenvectors (empty if not requested)
};

/// Eigendecomposition of a symmetric matrix (LAPACK dsyevd, lower triangle used).
/// Throws ConvergenceError if LAPACK reports failure.
SymmetricEigen symmetric_eigen(const Eigen::MatrixXd& a, bool with_vectors = true);

Eigen::VectorXd symmetric_eigenvalues(const Eigen::MatrixXd& a);

}  // namespace psdflow::simulate
