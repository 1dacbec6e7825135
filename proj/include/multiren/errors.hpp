#pragma once

#include <stdexcept>
#include <string>

namespace multiren {

/// Root of every error raised by the library.
///
/// Errors fall in two families: domain errors (bad input, a map that is not
/// renormalizable, a combinatorial object that fails a check) and numeric
/// errors (a solver that did not converge, a bracket that could not be
/// resolved). The command line maps them to distinct exit codes.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
  virtual bool numeric() const noexcept { return false; }
};

class NumericError : public Error {
 public:
  using Error::Error;
  bool numeric() const noexcept override { return true; }
};

#define MULTIREN_DEFINE_ERROR(Name, Base) \
  class Name : public Base {              \
   public:                                \
    using Base::Base;                     \
  };

// combinatorics
MULTIREN_DEFINE_ERROR(PartitionError, Error)
MULTIREN_DEFINE_ERROR(CriticalCountError, Error)
MULTIREN_DEFINE_ERROR(FoldingError, Error)
MULTIREN_DEFINE_ERROR(ReachabilityError, Error)
MULTIREN_DEFINE_ERROR(NoEntryError, Error)
MULTIREN_DEFINE_ERROR(NotPureError, Error)
MULTIREN_DEFINE_ERROR(NotTransitiveError, Error)
MULTIREN_DEFINE_ERROR(CriticalMismatchError, Error)
MULTIREN_DEFINE_ERROR(SizeLimitError, Error)
MULTIREN_DEFINE_ERROR(NotAdmissibleError, Error)
MULTIREN_DEFINE_ERROR(NotEssentialError, Error)
MULTIREN_DEFINE_ERROR(NotPrimitiveError, Error)

// real dynamics
MULTIREN_DEFINE_ERROR(DomainError, Error)
MULTIREN_DEFINE_ERROR(RangeError, Error)
MULTIREN_DEFINE_ERROR(DegenerateError, Error)
MULTIREN_DEFINE_ERROR(InconsistentStructureError, Error)
MULTIREN_DEFINE_ERROR(NotCriticallyFiniteError, Error)

// renormalization
MULTIREN_DEFINE_ERROR(NotRenormalizableError, Error)
MULTIREN_DEFINE_ERROR(NonStationaryTypeError, Error)
MULTIREN_DEFINE_ERROR(PrecisionError, NumericError)

// realization
MULTIREN_DEFINE_ERROR(NotInteriorError, Error)
MULTIREN_DEFINE_ERROR(NoConvergenceError, NumericError)
MULTIREN_DEFINE_ERROR(VerificationError, Error)

// complex side
MULTIREN_DEFINE_ERROR(NotMonicError, Error)
MULTIREN_DEFINE_ERROR(DegreeError, Error)
MULTIREN_DEFINE_ERROR(ZeroParamError, Error)
MULTIREN_DEFINE_ERROR(RootFindingError, NumericError)

// files and other external input
MULTIREN_DEFINE_ERROR(InputError, Error)

// experiments
MULTIREN_DEFINE_ERROR(InsufficientDataError, Error)

#undef MULTIREN_DEFINE_ERROR

}  // namespace multiren
