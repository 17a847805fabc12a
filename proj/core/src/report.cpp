#include "vortexed/report.hpp"

#include <cmath>
#include <fstream>

#include <fmt/format.h>
#include <json.hpp>

#include "vortexed/error.hpp"

namespace vortexed {

namespace {

using Json = nlohmann::ordered_json;

std::string csv_number(double v) { return std::isnan(v) ? "nan" : fmt::format("{}", v); }

const char* parity_name(Parity p) {
  switch (p) {
    case Parity::even:
      return "even";
    case Parity::odd:
      return "odd";
    case Parity::mixed:
      break;
  }
  return "mixed";
}

Json config_json(const RunConfig& config) {
  Json out = Json::object();
  for (const auto& [key, value] : to_key_values(config)) out[key] = value;
  return out;
}

Json model_json(const Problem& problem) {
  const ModelParams& p = problem.params();
  return Json{{"particles", p.particles},
              {"g", p.g},
              {"anisotropy", p.anisotropy},
              {"n_ll", p.landau_levels},
              {"l_min", p.l_min},
              {"l_max", p.l_max},
              {"basis_dimension", problem.basis().size()},
              {"mode_count", problem.basis().mode_count()}};
}

Json orbital_json(const NaturalOrbitals& orbitals, std::size_t i, const std::vector<SpMode>& modes) {
  Json coefficients = Json::array();
  const auto psi = orbitals.orbital(i);
  for (std::size_t k = 0; k < modes.size(); ++k) {
    if (psi[k] == 0.0) continue;
    coefficients.push_back(Json{{"n", modes[k].n}, {"m", modes[k].m}, {"c", psi[k]}});
  }
  return Json{{"occupation", orbitals.occupations[i]},
              {"parity", parity_name(orbitals.parity[i])},
              {"coefficients", std::move(coefficients)}};
}

Json point_json(const Problem& problem, const PointResult& r) {
  const SweepPoint& p = r.point;
  Json out{{"omega", p.omega}, {"e0", p.e0}, {"gap", p.gap}, {"converged", p.converged}};
  out["residual_norms"] = r.eigen.residual_norms;
  out["occupations"] = r.orbitals.occupations;
  Json parities = Json::array();
  for (Parity q : r.orbitals.parity) parities.push_back(parity_name(q));
  out["parities"] = std::move(parities);
  out["signed_difference"] = r.signed_difference;
  Json leading = Json::array();
  for (std::size_t i = 0; i < std::min<std::size_t>(2, r.orbitals.occupations.size()); ++i) {
    leading.push_back(orbital_json(r.orbitals, i, problem.basis().modes()));
  }
  out["natural_orbitals"] = std::move(leading);
  if (r.two_mode) {
    out["two_mode"] = Json{{"coefficients", r.two_mode->coefficients},
                           {"probabilities", r.two_mode->probabilities},
                           {"fidelity", r.two_mode->fidelity},
                           {"odd_weight", r.two_mode->odd_weight}};
  } else {
    out["two_mode"] = nullptr;
  }
  if (r.qfi) {
    out["qfi"] = Json{{"fq", r.qfi->fq},
                      {"mean_n1", r.qfi->mean_n1},
                      {"var_n1", r.qfi->var_n1},
                      {"dphi_bound", r.qfi->dphi_bound}};
  } else {
    out["qfi"] = nullptr;
  }
  const ValidityReport v = validity_diagnostics(problem.params().particles, problem.params().g, p.omega);
  out["validity"] = Json{{"ng", v.ng},
                         {"lll_scale", v.lll_scale},
                         {"lll_ratio", v.lll_ratio},
                         {"g_max", v.g_max},
                         {"g_ratio", v.g_ratio}};
  out["error"] = p.error;
  return out;
}

std::string dump(const Json& j) { return j.dump(2) + "\n"; }

}  // namespace

std::string sweep_csv(std::span<const SweepPoint> points) {
  std::string out(kSweepCsvHeader);
  out += '\n';
  for (const SweepPoint& p : points) {
    out += fmt::format("{},{},{},{},{},{},{},{},{},{},{},{},{},{}\n", csv_number(p.omega), csv_number(p.g),
                       csv_number(p.anisotropy), p.n_ll, p.l_min, p.l_max, csv_number(p.e0), csv_number(p.gap),
                       csv_number(p.lam1), csv_number(p.lam2), csv_number(p.lam3), csv_number(p.fidelity),
                       csv_number(p.fq), csv_number(p.dphi));
  }
  return out;
}

std::string basis_json(const RunConfig& config, const FockBasis& basis) {
  const BasisSpec& spec = basis.spec();
  Json modes = Json::array();
  for (const SpMode& m : basis.modes()) modes.push_back(Json{{"n", m.n}, {"m", m.m}});
  Json blocks = Json::array();
  for (int l = spec.l_min; l <= spec.l_max; ++l) {
    const IndexRange r = basis.block_of(l);
    blocks.push_back(Json{{"l", l}, {"begin", r.begin}, {"size", r.size()}});
  }
  Json out{{"kind", "basis"}, {"config", config_json(config)}};
  out["dimension"] = basis.size();
  out["modes"] = std::move(modes);
  out["blocks"] = std::move(blocks);
  return dump(out);
}

std::string metrology_json(const RunConfig& config, const Problem& problem, const PointResult& point) {
  Json out{{"kind", "metrology"}, {"config", config_json(config)}, {"model", model_json(problem)}};
  out["point"] = point_json(problem, point);
  return dump(out);
}

std::string critical_json(const RunConfig& config, const Problem& problem, const CriticalPoint& critical,
                          const std::optional<LmaxConvergence>& convergence) {
  Json out{{"kind", "critical"}, {"config", config_json(config)}, {"model", model_json(problem)}};
  out["omega_c"] = critical.omega_c;
  out["bracket"] = Json::array({critical.bracket_lo, critical.bracket_hi});
  out["residual"] = critical.residual;
  out["residual_tolerance"] = 1e-6 * problem.params().particles;
  out["evaluations"] = critical.evaluations;
  out["point"] = point_json(problem, critical.at_critical);
  if (convergence) {
    out["l_max_convergence"] = Json{{"l_max", convergence->l_max},
                                    {"omega_c", convergence->omega_c},
                                    {"omega_c_wider", convergence->omega_c_wider},
                                    {"shift", convergence->shift},
                                    {"converged", convergence->converged}};
  } else {
    out["l_max_convergence"] = nullptr;
  }
  return dump(out);
}

std::string width_json(const RunConfig& config, double omega_c, const WidthResult& width) {
  Json out{{"kind", "width"}, {"config", config_json(config)}};
  out["omega_c"] = omega_c;
  out["width"] = width.width;
  out["omega_half"] = width.omega_half;
  out["peak"] = width.peak;
  out["fq_at_omega_c"] = width.center_value;
  out["peak_off_center"] = width.peak_off_center;
  out["evaluations"] = width.evaluations;
  return dump(out);
}

std::string comparison_json(const RunConfig& config, const TruncationComparison& c) {
  Json out{{"kind", "compare-levels"}, {"config", config_json(config)}};
  out["pair"] = fmt::format("({},{})", c.ll_a, c.ll_b);
  out["ll_a"] = c.ll_a;
  out["ll_b"] = c.ll_b;
  out["omega_c_a"] = c.omega_c_a;
  out["omega_c_b"] = c.omega_c_b;
  out["fq_a_at_omega_c_a"] = c.fq_a;
  out["fq_b_at_omega_c_a"] = c.fq_b;
  out["omega_shift"] = c.omega_shift;
  out["fq_change"] = c.fq_change;
  return dump(out);
}

std::string spectrum_json(const RunConfig& config, const IsotropicSpectrum& s) {
  Json blocks = Json::array();
  for (const BlockEnergy& b : s.blocks) {
    blocks.push_back(Json{{"l", b.l}, {"dimension", b.dimension}, {"e_static", b.e_static}, {"energy", b.energy}});
  }
  Json out{{"kind", "spectrum-per-l"}, {"config", config_json(config)}};
  out["omega"] = s.omega;
  out["blocks"] = std::move(blocks);
  out["omega_1"] = s.omega_1;
  out["l_jump"] = s.l_jump;
  return dump(out);
}

RunConfig config_from_json(std::string_view json_text) {
  Json doc;
  try {
    doc = Json::parse(json_text);
  } catch (const Json::exception& e) {
    throw Error(ErrorCategory::io, fmt::format("invalid JSON: {}", e.what()));
  }
  if (!doc.contains("config") || !doc["config"].is_object()) {
    throw Error(ErrorCategory::config, "JSON document has no config object");
  }
  KeyValues values;
  for (const auto& [key, value] : doc["config"].items()) {
    if (!value.is_string()) throw Error(ErrorCategory::config, fmt::format("config key '{}' is not a string", key));
    values[key] = value.get<std::string>();
  }
  return make_config(values);
}

void write_file(const std::filesystem::path& path, std::string_view content) {
  std::error_code ec;
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path(), ec);
  if (ec) throw Error(ErrorCategory::io, fmt::format("cannot create '{}': {}", path.parent_path().string(), ec.message()));
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(ErrorCategory::io, fmt::format("cannot open '{}' for writing", path.string()));
  out.write(content.data(), static_cast<std::streamsize>(content.size()));
  if (!out) throw Error(ErrorCategory::io, fmt::format("write to '{}' failed", path.string()));
}

}  // namespace vortexed
