#pragma once

#include <stdexcept>
#include <string>

namespace turnpike {

// Base class for every failure the library raises deliberately. Callers that
// want blanket handling catch this; tests and the CLI discriminate by subtype.
class Error : public std::runtime_error {
 public:
  explicit Error(const std::string& what) : std::runtime_error(what) {}
};

#define TURNPIKE_DEFINE_ERROR(Name)                             \
  class Name : public Error {                                   \
   public:                                                      \
    explicit Name(const std::string& what) : Error(what) {}     \
  }

// Shape and argument validation.
TURNPIKE_DEFINE_ERROR(DimensionMismatch);
TURNPIKE_DEFINE_ERROR(InvalidArgument);

// System-theoretic preconditions.
TURNPIKE_DEFINE_ERROR(NotStabilizable);
TURNPIKE_DEFINE_ERROR(NotDetectable);
TURNPIKE_DEFINE_ERROR(NotHurwitz);
TURNPIKE_DEFINE_ERROR(SingularQ);

// Numerical breakdowns in the solvers.
TURNPIKE_DEFINE_ERROR(NoConvergence);
TURNPIKE_DEFINE_ERROR(IllConditioned);
TURNPIKE_DEFINE_ERROR(EigenFailure);
TURNPIKE_DEFINE_ERROR(SingularSystem);
TURNPIKE_DEFINE_ERROR(ExpOverflow);
TURNPIKE_DEFINE_ERROR(SingularMonodromy);
TURNPIKE_DEFINE_ERROR(SingularCoupling);
TURNPIKE_DEFINE_ERROR(SingularDiscretization);
TURNPIKE_DEFINE_ERROR(SingularJacobian);

// Structural mismatches between inputs.
TURNPIKE_DEFINE_ERROR(GridMismatch);
TURNPIKE_DEFINE_ERROR(PeriodMismatch);

// Nonlinear saddle analysis.
TURNPIKE_DEFINE_ERROR(LegendreViolation);
TURNPIKE_DEFINE_ERROR(IndefiniteCtC);

// Decay-rate fitting.
TURNPIKE_DEFINE_ERROR(DegenerateData);
TURNPIKE_DEFINE_ERROR(NoDecay);

// Problem I/O.
TURNPIKE_DEFINE_ERROR(ParseError);
TURNPIKE_DEFINE_ERROR(ValidationError);
TURNPIKE_DEFINE_ERROR(BadSubdomain);

#undef TURNPIKE_DEFINE_ERROR

}  // namespace turnpike
