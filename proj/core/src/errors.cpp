#include "dsm/errors.hpp"

namespace dsm {

std::string_view to_string(ErrorKind kind) noexcept {
  switch (kind) {
    case ErrorKind::Input: return "input_error";
    case ErrorKind::Domain: return "domain_error";
    case ErrorKind::NoSolution: return "no_solution";
    case ErrorKind::NoiseDominates: return "noise_dominates";
    case ErrorKind::InconsistentData: return "inconsistent_data";
    case ErrorKind::HorizonExceeded: return "horizon_exceeded";
    case ErrorKind::Accuracy: return "accuracy_error";
    case ErrorKind::Configuration: return "configuration_error";
  }
  return "unknown_error";
}

}  // namespace dsm
