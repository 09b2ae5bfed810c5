#pragma once

#include <stdexcept>
#include <string>

namespace ruelle {

/// Base class for every error raised by the toolkit.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Numerical failures. The harness maps these to exit code 3.
class NumericalError : public Error {
 public:
  using Error::Error;
};

/// Bad input: invalid maps, violated preconditions, malformed config.
class InputError : public Error {
 public:
  using Error::Error;
};

#define RUELLE_DEFINE_ERROR(Name, Base) \
  class Name : public Base {            \
   public:                              \
    using Base::Base;                   \
  }

RUELLE_DEFINE_ERROR(RootFindingFailure, NumericalError);
RUELLE_DEFINE_ERROR(LeafBudgetExceeded, NumericalError);
RUELLE_DEFINE_ERROR(InconsistentEstimates, NumericalError);
RUELLE_DEFINE_ERROR(DegenerateDecay, NumericalError);
RUELLE_DEFINE_ERROR(NoDominantEigenvalue, NumericalError);
RUELLE_DEFINE_ERROR(NonConvexLambda, NumericalError);
RUELLE_DEFINE_ERROR(NegativeVariance, NumericalError);
RUELLE_DEFINE_ERROR(NoiseFloorReached, NumericalError);
RUELLE_DEFINE_ERROR(TooRare, NumericalError);
RUELLE_DEFINE_ERROR(Diverged, NumericalError);
RUELLE_DEFINE_ERROR(TruncationInsufficient, NumericalError);

RUELLE_DEFINE_ERROR(InvalidMap, InputError);
RUELLE_DEFINE_ERROR(PreconditionViolation, InputError);
RUELLE_DEFINE_ERROR(CocycleFlagged, InputError);
RUELLE_DEFINE_ERROR(ConfigError, InputError);

#undef RUELLE_DEFINE_ERROR

}  // namespace ruelle
