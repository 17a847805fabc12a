#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>

#include "vortexed/scanner.hpp"

namespace vortexed {

/// Raw key -> value strings, as read from a config file or flags.
using KeyValues = std::map<std::string, std::string, std::less<>>;

/// Effective run configuration. n, g, a and n_ll are required; everything
/// else has a default. Unset l_min/l_max resolve to default_l_min(n_ll) and
/// default_l_max(n).
struct RunConfig {
  int n = 0;
  double g = 0.0;
  double a = 0.0;
  int n_ll = 1;
  std::optional<int> l_min;
  std::optional<int> l_max;
  std::optional<double> omega;
  std::optional<double> omega_lo;
  std::optional<double> omega_hi;
  int omega_steps = 200;
  double tol = 1e-10;
  std::uint64_t seed = 1;
  int threads = 0;  // 0: library default
  std::string out_dir = ".";
  std::size_t dense_cap = 400;  // largest dimension solved densely
  std::size_t basis_cap = 50'000'000;

  int effective_l_min() const noexcept { return l_min.value_or(default_l_min(n_ll)); }
  int effective_l_max() const noexcept { return l_max.value_or(default_l_max(n)); }
  ModelParams model() const noexcept;
  SolverSettings solver() const noexcept;

  friend bool operator==(const RunConfig&, const RunConfig&) = default;
};

std::span<const std::string_view> config_keys() noexcept;

/// Flat `key = value` lines; '#' starts a comment. Throws config on
/// malformed lines, unknown keys and repeated keys.
KeyValues parse_key_values(std::string_view text);

/// Validates and converts. Errors name the offending key.
RunConfig make_config(const KeyValues& values);

/// File contents with `overrides` taking precedence.
RunConfig parse_config(std::string_view file_text, const KeyValues& overrides = {});
RunConfig load_config(const std::filesystem::path& path, const KeyValues& overrides = {});

/// Keys that are set, with values that parse back to the same config.
KeyValues to_key_values(const RunConfig& config);
std::string to_text(const RunConfig& config);

/// Dimensionless 2D coupling sqrt(8 pi) a / lambda_z.
double convert_g(double scattering_length, double lambda_z);

/// Thread count to use: VORTEXED_THREADS if set to a positive integer,
/// otherwise config.threads (0 keeps the library default).
int resolve_threads(const RunConfig& config);
void apply_threads(int threads);

}  // namespace vortexed
