#pragma once

#include <stdexcept>
#include <string>

namespace mixrec {

// Base class for all recoverable library errors. Argument/shape violations
// use std::invalid_argument directly.
struct Error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct IoError : Error {
  using Error::Error;
};

// Bad magic, truncated payload, unparseable config/graph/report files.
struct FormatError : Error {
  using Error::Error;
};

// A Gram matrix whose entries cannot come from any valid mixup matrix
// (out-of-range entries, asymmetry, non-transitive duplicate groups).
// Signals upstream estimation failure.
struct InconsistentGramError : Error {
  using Error::Error;
};

// Support selection hit an exact tie at the sparsity boundary.
struct AmbiguousSupportError : Error {
  using Error::Error;
};

struct NotLineGraphError : Error {
  using Error::Error;
};

struct DisconnectedGraphError : Error {
  using Error::Error;
};

// An internal cross-check failed (e.g. a reconstruction that does not
// reproduce its own input). Indicates a bug, not bad data.
struct InternalInconsistencyError : Error {
  using Error::Error;
};

// Input exceeds a hard enumeration bound; refusing instead of running forever.
struct ResourceBoundError : Error {
  using Error::Error;
};

// The rounding-gap bound of the cut-reduction verifier was violated.
struct SoundnessBoundError : Error {
  using Error::Error;
};

}  // namespace mixrec
