#pragma once

#include <complex>
#include <functional>
#include <mutex>
#include <unordered_map>
#include <vector>

#include "psdflow/params.hpp"
#include "psdflow/spectral/cubic.hpp"

namespace psdflow::spectral {

/// P(z): normalized trace of the resolvent (H - z)^{-1}.
/// Q(z): d-normalized trace of X*^T (H - z)^{-1} X*.
enum class TransformKind { P, Q };

const char* kind_name(TransformKind kind);

/// The degree-3 polynomial whose Herglotz root is P(z) (resp. Q(z)).
Cubic transform_cubic(TransformKind kind, const ModelParams& params, cplx z);

/// Stieltjes-transform branch of the cubic at z.
///
/// Im z > 0: the root with positive imaginary part; when that is not unique (or not clear
/// above rounding), the branch is continued from the anchor Re z + 1e6 i, where the root
/// is identified by -z * root ~ 1. Im z < 0: conjugate symmetry. Im z == 0: boundary value
/// from above, i.e. the complex root with positive imaginary part inside the support and
/// the continued real root outside it.
///
/// Throws NoHerglotzRoot if the selected root lies in the wrong half-plane and
/// ConvergenceError if the cubic cannot be solved.
cplx solve_cubic_branch(TransformKind kind, const ModelParams& params, cplx z);

/// Follows a root of a z-dependent polynomial from a large-|z| anchor down the vertical
/// line through `target`, choosing at each step the root closest to the previous one.
/// `roots_of(z)` returns all roots; the anchor root is the one closest to -1/z.
cplx track_branch(const std::function<std::vector<cplx>(cplx)>& roots_of, cplx target);

/// Discriminant of the P cubic at real z (leading coefficient 1).
/// > 0: three real roots, rho_P(z) = 0. < 0: complex pair, rho_P(z) > 0.
double discriminant_P(const ModelParams& params, double z);

/// Memoizing wrapper around solve_cubic_branch. Safe for concurrent calls.
class StieltjesFn {
 public:
  StieltjesFn(TransformKind kind, ModelParams params) : kind_(kind), params_(params) {}
  StieltjesFn(const StieltjesFn& other) : kind_(other.kind_), params_(other.params_) {}

  cplx operator()(cplx z) const;

  TransformKind kind() const { return kind_; }
  const ModelParams& params() const { return params_; }
  std::size_t cache_size() const;

 private:
  struct Hash {
    std::size_t operator()(const cplx& z) const noexcept;
  };

  TransformKind kind_;
  ModelParams params_;
  mutable std::mutex mutex_;
  mutable std::unordered_map<cplx, cplx, Hash> cache_;
};

}  // namespace psdflow::spectral
