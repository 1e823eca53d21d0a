#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace cifeast {

enum class ErrorKind {
  InvalidArgument,
  DimensionMismatch,
  ExactSingular,
  NoConvergence,
  SingularPencilProjection,
  PoleCollision,
  AllNodesSingular,
  SubspaceCollapse,
  NotHermitian,
  ZeroVector,
  SizeMismatch,
  DenseLimitExceeded,
  BothReductionsIllConditioned,
  IndexOutOfRange,
  ParseError,
  UnsupportedField,
  IoError,
};

std::string_view to_string(ErrorKind kind);

// Single exception type for the library; the kind is what callers branch on.
class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& message)
      : std::runtime_error(message), kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

[[noreturn]] inline void fail(ErrorKind kind, const std::string& message) {
  throw Error(kind, message);
}

}  // namespace cifeast
