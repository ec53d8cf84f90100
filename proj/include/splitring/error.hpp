#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace splitring {

enum class ErrorKind {
  InvalidParam,
  SingularSystem,
  NotUnitary,
  BranchAmbiguity,
  NoConvergence,
  DivisionByZero,
  NoResonanceFound,
  NotConverged,
  Config,
};

constexpr std::string_view to_string(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::InvalidParam: return "invalid-param";
    case ErrorKind::SingularSystem: return "singular-system";
    case ErrorKind::NotUnitary: return "not-unitary";
    case ErrorKind::BranchAmbiguity: return "branch-ambiguity";
    case ErrorKind::NoConvergence: return "no-convergence";
    case ErrorKind::DivisionByZero: return "division-by-zero";
    case ErrorKind::NoResonanceFound: return "no-resonance-found";
    case ErrorKind::NotConverged: return "not-converged";
    case ErrorKind::Config: return "config";
  }
  return "unknown";
}

/// Every failure raised by the library carries one of the categories above so
/// that the CLI can map it onto an exit code without string matching.
class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& detail)
      : std::runtime_error(detail), kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

}  // namespace splitring
