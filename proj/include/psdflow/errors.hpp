#pragma once

#include <stdexcept>
#include <string>

namespace psdflow {

/// Invalid user-facing input (parameters, grids, configs). Maps to CLI exit code 2.
class ValidationError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Base for every numerical failure. Maps to CLI exit code 3.
class NumericalError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

#define PSDFLOW_NUMERICAL_ERROR(Name)                 \
  class Name : public NumericalError {               \
   public:                                           \
    explicit Name(const std::string& what)           \
        : NumericalError(#Name ": " + what) {}       \
  }

// spectral
PSDFLOW_NUMERICAL_ERROR(NoHerglotzRoot);
PSDFLOW_NUMERICAL_ERROR(ConvergenceError);
PSDFLOW_NUMERICAL_ERROR(MassDeficit);
PSDFLOW_NUMERICAL_ERROR(NoBracket);
PSDFLOW_NUMERICAL_ERROR(PoleAtOne);

// flow
PSDFLOW_NUMERICAL_ERROR(NonConvergence);
PSDFLOW_NUMERICAL_ERROR(QuadratureFailure);
PSDFLOW_NUMERICAL_ERROR(ContourRealLineMismatch);
PSDFLOW_NUMERICAL_ERROR(DenominatorNearZero);
PSDFLOW_NUMERICAL_ERROR(MomentSanityFailure);
PSDFLOW_NUMERICAL_ERROR(CdfBracketFailure);

// pencil
PSDFLOW_NUMERICAL_ERROR(SingularIterate);
PSDFLOW_NUMERICAL_ERROR(SingularSample);

// simulate
PSDFLOW_NUMERICAL_ERROR(Divergence);
PSDFLOW_NUMERICAL_ERROR(InnerSolveFailure);

#undef PSDFLOW_NUMERICAL_ERROR

}  // namespace psdflow
