#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace bae {

enum class ErrorKind {
  InvalidDimension,
  InvalidParameter,
  OutOfRange,
  DimensionMismatch,
  DegenerateConditioning,
  GridTooNarrow,
  TruncationOverflow,
  SetupMismatch,
  EmptyRecords,
  InvalidConfig,
};

std::string_view to_string(ErrorKind kind);

/// Every failure raised by the library carries a machine-readable kind so the
/// command-line front end can map it onto a documented exit code.
class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what)
      : std::runtime_error(what), kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

[[noreturn]] void fail(ErrorKind kind, const std::string& what);

}  // namespace bae
