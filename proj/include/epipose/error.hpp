#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace epipose {

enum class ErrorKind {
  InvalidArgument,
  InvalidIntrinsics,
  InvalidRotation,
  InvalidFundamental,
  DegenerateMotion,
  DegenerateLine,
  BadGrid,
  BadKernel,
  ImageTooSmall,
  ShapeMismatch,
  DecodeError,
  UnsupportedBitDepth,
  ParseError,
  MissingField,
  FormatError,
  IoError,
};

std::string_view to_string(ErrorKind kind) noexcept;

/// Every failure raised by the library carries one of the kinds above so
/// callers (notably the CLI exit-code mapping) can branch on it.
class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& message)
      : std::runtime_error(std::string(to_string(kind)) + ": " + message),
        kind_(kind),
        message_(message) {}

  [[nodiscard]] ErrorKind kind() const noexcept { return kind_; }
  /// The message without the kind prefix.
  [[nodiscard]] const std::string& message() const noexcept { return message_; }

 private:
  ErrorKind kind_;
  std::string message_;
};

}  // namespace epipose
