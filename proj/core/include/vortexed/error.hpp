#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace vortexed {

enum class ErrorCategory {
  invalid_argument,
  config,
  dimension_cap_exceeded,
  empty_basis,
  out_of_window,
  missing_table_entry,
  dimension_mismatch,
  no_convergence,
  dimension_too_large,
  unnormalized_state,
  leakage,
  odd_particle_number,
  inconsistent_orbitals,
  no_crossing,
  io,
};

std::string_view category_name(ErrorCategory category) noexcept;

/// Process exit code used by the CLI for each error category.
int exit_code(ErrorCategory category) noexcept;

class Error : public std::runtime_error {
 public:
  Error(ErrorCategory category, const std::string& what)
      : std::runtime_error(what), category_(category) {}

  ErrorCategory category() const noexcept { return category_; }

 private:
  ErrorCategory category_;
};

}  // namespace vortexed
