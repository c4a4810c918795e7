#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace nevan {

enum class ErrorKind {
  Parse,
  InvalidArgument,
  DivisionByZero,
  Overflow,
  IndeterminatePhase,
  NoConvergence,
  WindingAmbiguous,
  NeedsDivisorOracle,
  InsufficientGrowth,
  IdenticallyZero,
  DegenerateRational,
  NotASolution,
  NewtonStall,
};

inline std::string_view to_string(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::Parse: return "ParseError";
    case ErrorKind::InvalidArgument: return "InvalidArgument";
    case ErrorKind::DivisionByZero: return "DivisionByZero";
    case ErrorKind::Overflow: return "Overflow";
    case ErrorKind::IndeterminatePhase: return "IndeterminatePhase";
    case ErrorKind::NoConvergence: return "NoConvergence";
    case ErrorKind::WindingAmbiguous: return "WindingAmbiguous";
    case ErrorKind::NeedsDivisorOracle: return "NeedsDivisorOracle";
    case ErrorKind::InsufficientGrowth: return "InsufficientGrowth";
    case ErrorKind::IdenticallyZero: return "IdenticallyZero";
    case ErrorKind::DegenerateRational: return "DegenerateRational";
    case ErrorKind::NotASolution: return "NotASolution";
    case ErrorKind::NewtonStall: return "NewtonStall";
  }
  return "Unknown";
}

/// Every failure raised by the library. `kind()` is what callers branch on;
/// the message names the operation that failed.
class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what)
      : std::runtime_error(std::string(to_string(kind)) + ": " + what), kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }

  /// Input problems (bad text, bad flags) as opposed to numeric failures.
  bool is_input_error() const noexcept {
    return kind_ == ErrorKind::Parse || kind_ == ErrorKind::InvalidArgument;
  }

 private:
  ErrorKind kind_;
};

}  // namespace nevan
