#include "psdflow/simulate/linalg.hpp"

#include <lapacke.h>

#include <string>

#include "psdflow/errors.hpp"

namespace psdflow::simulate {

SymmetricEigen symmetric_eigen(const Eigen::MatrixXd& a, bool with_vectors) {
  if (a.rows() != a.cols()) throw ValidationError("symmetric_eigen needs a square matrix");
  SymmetricEigen out;
  Eigen::MatrixXd work = a;
  out.values.resize(a.rows());
  if (a.rows() == 0) return out;
  const lapack_int n = static_cast<lapack_int>(a.rows());
  const lapack_int info = LAPACKE_dsyevd(LAPACK_COL_MAJOR, with_vectors ? 'V' : 'N', 'L', n,
                                         work.data(), n, out.values.data());
  if (info != 0) throw ConvergenceError("dsyevd failed with info " + std::to_string(info));
  if (with_vectors) out.vectors = std::move(work);
  return out;
}

Eigen::VectorXd symmetric_eigenvalues(const Eigen::MatrixXd& a) {
  return symmetric_eigen(a, false).values;
}

}  // namespace psdflow::simulate
