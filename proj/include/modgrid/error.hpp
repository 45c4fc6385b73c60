#pragma once

#include <stdexcept>
#include <string>

namespace modgrid {

enum class ErrorCode {
  EmptyPalette,
  BadGeometry,
  IndexOverflow,
  OutOfRange,
  EmptyConfig,
  UnknownCharacter,
  InvalidArgument,
  OrderMismatch,
  ImageFormat,
  Io,
  EmptyDirectory,
  DanglingModule,
  TooLarge,
};

inline const char* to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::EmptyPalette: return "EmptyPalette";
    case ErrorCode::BadGeometry: return "BadGeometry";
    case ErrorCode::IndexOverflow: return "IndexOverflow";
    case ErrorCode::OutOfRange: return "OutOfRange";
    case ErrorCode::EmptyConfig: return "EmptyConfig";
    case ErrorCode::UnknownCharacter: return "UnknownCharacter";
    case ErrorCode::InvalidArgument: return "InvalidArgument";
    case ErrorCode::OrderMismatch: return "OrderMismatch";
    case ErrorCode::ImageFormat: return "ImageFormat";
    case ErrorCode::Io: return "Io";
    case ErrorCode::EmptyDirectory: return "EmptyDirectory";
    case ErrorCode::DanglingModule: return "DanglingModule";
    case ErrorCode::TooLarge: return "TooLarge";
  }
  return "Unknown";
}

/// Every failure raised by the library carries one of the codes above so
/// callers (the CLI, the HTTP service) can map it to an exit code or status.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(std::string(to_string(code)) + ": " + what), code_(code), detail_(what) {}

  ErrorCode code() const noexcept { return code_; }
  /// Message without the code prefix.
  const std::string& detail() const noexcept { return detail_; }

 private:
  ErrorCode code_;
  std::string detail_;
};

}  // namespace modgrid
