#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace dsm {

/// Failure categories surfaced by the library. The harness maps them to
/// CSV status codes and process exit codes.
enum class ErrorKind {
  Input,            // malformed or non-finite input, dimension mismatch
  Domain,           // argument outside the mathematical domain (a <= 0, t < 0)
  NoSolution,       // equation has no solution on the admissible set
  NoiseDominates,   // ||f_delta|| <= c * delta
  InconsistentData, // ||P f_delta|| >= c * delta
  HorizonExceeded,  // no discrepancy crossing before t_max
  Accuracy,         // quadrature or root finding did not converge
  Configuration,    // schedule or solver configuration unusable for the data
};

std::string_view to_string(ErrorKind kind) noexcept;

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what)
      : std::runtime_error(what), kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }

  /// True for the failures the harness reports as solver precondition
  /// failures (exit code 3).
  bool is_precondition() const noexcept {
    return kind_ == ErrorKind::NoiseDominates ||
           kind_ == ErrorKind::InconsistentData ||
           kind_ == ErrorKind::HorizonExceeded ||
           kind_ == ErrorKind::Configuration;
  }

 private:
  ErrorKind kind_;
};

}  // namespace dsm
