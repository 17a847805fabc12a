#pragma once

#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <string_view>

#include "vortexed/config.hpp"
#include "vortexed/scanner.hpp"

namespace vortexed {

inline constexpr std::string_view kSweepCsvHeader =
    "omega,g,A,n_ll,l_min,l_max,e0,gap,lam1,lam2,lam3,fidelity,fq,dphi";

/// Header line plus one row per point; numbers in shortest round-trip form,
/// NaN written as "nan".
std::string sweep_csv(std::span<const SweepPoint> points);

// JSON documents. Each embeds the effective config under "config" as the
// same string map that make_config accepts.

std::string basis_json(const RunConfig& config, const FockBasis& basis);
std::string metrology_json(const RunConfig& config, const Problem& problem, const PointResult& point);
std::string critical_json(const RunConfig& config, const Problem& problem, const CriticalPoint& critical,
                          const std::optional<LmaxConvergence>& convergence = std::nullopt);
std::string width_json(const RunConfig& config, double omega_c, const WidthResult& width);
std::string comparison_json(const RunConfig& config, const TruncationComparison& comparison);
std::string spectrum_json(const RunConfig& config, const IsotropicSpectrum& spectrum);

/// Reads the "config" member of a JSON document written above.
RunConfig config_from_json(std::string_view json_text);

/// Writes `content` to `path`, creating parent directories. Throws io.
void write_file(const std::filesystem::path& path, std::string_view content);

}  // namespace vortexed
