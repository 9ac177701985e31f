#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace etf {

enum class ErrorKind {
  InvalidInput,
  NotInvertible,
  NotPSD,
  NotDecomposable,
  InvalidCase2State,
  InfeasiblePrefix,
  EndOfStream,
};

constexpr std::string_view to_string(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::InvalidInput: return "InvalidInput";
    case ErrorKind::NotInvertible: return "NotInvertible";
    case ErrorKind::NotPSD: return "NotPSD";
    case ErrorKind::NotDecomposable: return "NotDecomposable";
    case ErrorKind::InvalidCase2State: return "InvalidCase2State";
    case ErrorKind::InfeasiblePrefix: return "InfeasiblePrefix";
    case ErrorKind::EndOfStream: return "EndOfStream";
  }
  return "Unknown";
}

/// Mathematical failure raised by the library. `reason` is a short
/// machine-readable tag (e.g. "FailNormCondition"); what() carries the prose.
class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, std::string reason, const std::string& message)
      : std::runtime_error(std::string(to_string(kind)) + ": " + message),
        kind_(kind),
        reason_(std::move(reason)) {}

  Error(ErrorKind kind, const std::string& message) : Error(kind, std::string(to_string(kind)), message) {}

  ErrorKind kind() const noexcept { return kind_; }
  const std::string& reason() const noexcept { return reason_; }

 private:
  ErrorKind kind_;
  std::string reason_;
};

}  // namespace etf
