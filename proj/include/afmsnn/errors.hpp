#pragma once

#include <stdexcept>
#include <string>

namespace afmsnn {

struct Error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct InvalidArgument : Error {
  using Error::Error;
};

/// The integrated state left the finite domain, usually because dt is too large.
struct NonFiniteError : Error {
  using Error::Error;
};

struct DimensionMismatch : Error {
  using Error::Error;
};

struct EmptyTraceError : Error {
  using Error::Error;
};

struct NoSpikeError : Error {
  using Error::Error;
};

struct UnsatisfiableError : Error {
  using Error::Error;
};

struct CalibrationFailed : Error {
  using Error::Error;
};

struct NoFeasibleCoupling : Error {
  using Error::Error;
};

struct AmbiguousClassification : Error {
  using Error::Error;
};

struct ConfigError : Error {
  using Error::Error;
};

}  // namespace afmsnn
