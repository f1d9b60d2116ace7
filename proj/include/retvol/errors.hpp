#pragma once

#include <stdexcept>
#include <string>

namespace retvol {

// Two error families, matching the CLI exit-code contract:
//   InputError   -> exit 2 (malformed files, bad parameters, length/shape mismatches)
//   ComputeError -> exit 3 (degenerate data or impossible requests discovered while estimating)
struct InputError : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct ComputeError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// ingest / parameter errors
struct MalformedRow : InputError { using InputError::InputError; };
struct NonPositivePrice : InputError { using InputError::InputError; };
struct NonMonotonicTimestamp : InputError { using InputError::InputError; };
struct TooShort : InputError { using InputError::InputError; };
struct DeltaTooLarge : InputError { using InputError::InputError; };
struct ProfileMismatch : InputError { using InputError::InputError; };
struct BadParameters : InputError { using InputError::InputError; };
struct WrongCurveKind : InputError { using InputError::InputError; };
struct RefTooShort : InputError { using InputError::InputError; };
struct SeriesTooShort : InputError { using InputError::InputError; };

// estimator / computation errors
struct ZeroVariance : ComputeError { using ComputeError::ComputeError; };
struct LagTooLarge : ComputeError { using ComputeError::ComputeError; };
struct EmptyCondition : ComputeError { using ComputeError::ComputeError; };
struct WindowTooLarge : ComputeError { using ComputeError::ComputeError; };
struct InsufficientPoints : ComputeError { using ComputeError::ComputeError; };
struct EmptySide : ComputeError { using ComputeError::ComputeError; };

}  // namespace retvol
