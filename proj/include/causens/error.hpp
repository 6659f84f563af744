#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace causens {

enum class ErrorKind {
  InvalidData,
  InvalidConfig,
  DegenerateData,
  DegeneratePair,
  ShapeMismatch,
  InsufficientData,
  IoError,
  ParseError,
  DimensionError,
  EmptyInput,
};

inline std::string_view to_string(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::InvalidData: return "InvalidData";
    case ErrorKind::InvalidConfig: return "InvalidConfig";
    case ErrorKind::DegenerateData: return "DegenerateData";
    case ErrorKind::DegeneratePair: return "DegeneratePair";
    case ErrorKind::ShapeMismatch: return "ShapeMismatch";
    case ErrorKind::InsufficientData: return "InsufficientData";
    case ErrorKind::IoError: return "IoError";
    case ErrorKind::ParseError: return "ParseError";
    case ErrorKind::DimensionError: return "DimensionError";
    case ErrorKind::EmptyInput: return "EmptyInput";
  }
  return "Unknown";
}

/// Single exception type for the library; callers dispatch on kind().
class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& message)
      : std::runtime_error(std::string(to_string(kind)) + ": " + message), kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }

  /// True for the two "degenerate" kinds (constant variables, identical rows).
  bool is_degenerate() const noexcept {
    return kind_ == ErrorKind::DegenerateData || kind_ == ErrorKind::DegeneratePair;
  }

 private:
  ErrorKind kind_;
};

}  // namespace causens
