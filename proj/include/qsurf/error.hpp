#pragma once

#include <stdexcept>
#include <string>

namespace qsurf {

enum class ErrorKind {
  InvalidParameter,
  Domain,
  DimensionMismatch,
  DegenerateObservation,
  Decomposition,
  UnsupportedDimension,
  ContractViolation,
  EmptyDataset,
  NoTrainableDirections,
  SingularCovariance,
  MissingLevel,
  Divergence,
  Unsupported,
  Io,
  Format,
};

const char* to_string(ErrorKind kind) noexcept;

// Single exception type for the library; callers branch on kind().
class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what)
      : std::runtime_error(std::string(to_string(kind)) + ": " + what), kind_(kind), detail_(what) {}

  ErrorKind kind() const noexcept { return kind_; }
  /// Message without the kind prefix.
  const std::string& detail() const noexcept { return detail_; }

 private:
  ErrorKind kind_;
  std::string detail_;
};

[[noreturn]] inline void fail(ErrorKind kind, const std::string& what) { throw Error(kind, what); }

}  // namespace qsurf
