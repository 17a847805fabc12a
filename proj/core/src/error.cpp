#include "vortexed/error.hpp"

namespace vortexed {

std::string_view category_name(ErrorCategory category) noexcept {
  switch (category) {
    case ErrorCategory::invalid_argument: return "invalid-argument";
    case ErrorCategory::config: return "config";
    case ErrorCategory::dimension_cap_exceeded: return "dimension-cap-exceeded";
    case ErrorCategory::empty_basis: return "empty-basis";
    case ErrorCategory::out_of_window: return "out-of-window";
    case ErrorCategory::missing_table_entry: return "missing-table-entry";
    case ErrorCategory::dimension_mismatch: return "dimension-mismatch";
    case ErrorCategory::no_convergence: return "no-convergence";
    case ErrorCategory::dimension_too_large: return "dimension-too-large";
    case ErrorCategory::unnormalized_state: return "unnormalized-state";
    case ErrorCategory::leakage: return "leakage";
    case ErrorCategory::odd_particle_number: return "odd-particle-number";
    case ErrorCategory::inconsistent_orbitals: return "inconsistent-orbitals";
    case ErrorCategory::no_crossing: return "no-crossing";
    case ErrorCategory::io: return "io";
  }
  return "unknown";
}

int exit_code(ErrorCategory category) noexcept {
  switch (category) {
    case ErrorCategory::config:
    case ErrorCategory::invalid_argument:
    case ErrorCategory::out_of_window:
      return 2;
    case ErrorCategory::dimension_cap_exceeded:
    case ErrorCategory::empty_basis:
    case ErrorCategory::dimension_too_large:
      return 3;
    case ErrorCategory::no_convergence:
      return 4;
    case ErrorCategory::no_crossing:
    case ErrorCategory::odd_particle_number:
      return 5;
    case ErrorCategory::io:
      return 6;
    default:
      return 1;
  }
}

}  // namespace vortexed
