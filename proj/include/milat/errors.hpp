#pragma once

#include <stdexcept>
#include <string>

namespace milat {

/// Base class for all solver/model errors.
struct Error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// A product/truncation discarded more tail mass than allowed.
struct TailOverflow : Error {
  using Error::Error;
};

/// The diagonal symbol vanishes on the working range (exact resonance).
struct SingularSymbol : Error {
  using Error::Error;
};

/// certify() did not admit the forcing; iteration refused.
struct NotAdmissible : Error {
  using Error::Error;
};

/// Observed fixed-point rate >= 1; Theta estimate is inconsistent.
struct NonContraction : Error {
  using Error::Error;
};

/// Newton iteration exhausted its iteration budget.
struct NoConvergence : Error {
  using Error::Error;
};

/// Newton Jacobian numerically singular; usually a fold.
struct SingularJacobian : Error {
  using Error::Error;
};

/// Arclength step shrank below the hard floor.
struct StepUnderflow : Error {
  using Error::Error;
};

/// The state-dependent mass matrix of the lattice is singular.
struct MassSingular : Error {
  using Error::Error;
};

/// Requested mode is not a simple resonance.
struct NotSimpleResonance : Error {
  using Error::Error;
};

/// The linear part of the reduced bifurcation system is degenerate.
struct DegenerateLinearPart : Error {
  using Error::Error;
};

/// The branch-slope discriminant is negative; no real branch.
struct ComplexBranch : Error {
  using Error::Error;
};

/// Dense eigenvalue iteration failed to converge.
struct EigenFailure : Error {
  using Error::Error;
};

/// Bad input (config validation, malformed series, ...).
struct InvalidArgument : Error {
  using Error::Error;
};

}  // namespace milat
