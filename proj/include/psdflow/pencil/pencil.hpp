#pragma once

#include <Eigen/Dense>
#include <complex>
#include <optional>
#include <vector>

#include "psdflow/fixed_point.hpp"
#include "psdflow/params.hpp"

namespace psdflow::pencil {

using cplx = std::complex<double>;
using CMatrix = Eigen::MatrixXcd;

/// eta(g)(row, col) += coeff * g(src_row, src_col)
struct EtaTerm {
  int row = 0;
  int col = 0;
  int src_row = 0;
  int src_col = 0;
  cplx coeff = 1.0;
};

/// A linear pencil with scalar blocks: block (i, j) of E[M] is c(i, j) times the
/// identity, and the covariance map eta is a sum of EtaTerm. Block i has relative
/// dimension dims[i].
struct PencilSpec {
  std::vector<double> dims;
  CMatrix c;
  std::vector<EtaTerm> eta;

  int k() const { return static_cast<int>(dims.size()); }
  CMatrix eta_of(const CMatrix& g) const;

  /// Requires dims > 0, a k x k constant, eta indices in range, C - eta(0) invertible,
  /// and couplings (C or eta) only between blocks of equal dimension.
  /// Throws ValidationError.
  void validate() const;
};

struct PencilSolution {
  CMatrix g;
  int iterations = 0;
  double residual = 0.0;  ///< max |g - blocktrace((C - eta(g))^{-1})|
  bool newton_used = false;

  cplx operator()(int i, int j) const { return g(i - 1, j - 1); }
};

/// Normalized block traces of (C - eta)^{-1} expanded over the block dimensions.
CMatrix blocktrace_inverse(const PencilSpec& spec, const CMatrix& eta);

/// Damped Picard iteration on g = blocktrace((C - eta(g))^{-1}) from `init`
/// (default blocktrace(C^{-1})), with a Newton restart per cfg.restart.
/// Throws SingularIterate, NonConvergence.
PencilSolution solve_pencil(const PencilSpec& spec, const FixedPointConfig& cfg = {},
                            const std::optional<CMatrix>& init = std::nullopt);

/// The 4 x 4 pencil whose inverse carries P and Q:
/// blocks (n, d, n, d), C = diag(1, 1, z + mu, 1).
PencilSpec mz_spec(const ModelParams& params, cplx z);

}  // namespace psdflow::pencil
