#include <cmath>
#include <cstdio>
#include <filesystem>
#include <map>
#include <optional>
#include <string>

#include <CLI11.hpp>
#include <fmt/format.h>

#include "vortexed/config.hpp"
#include "vortexed/error.hpp"
#include "vortexed/report.hpp"
#include "vortexed/scanner.hpp"

namespace fs = std::filesystem;
using namespace vortexed;

namespace {

struct Common {
  std::string config_path;
  std::string stem;
  std::map<std::string, std::string> flags;
};

void add_common(CLI::App* sub, Common& common) {
  sub->add_option("-c,--config", common.config_path, "flat key = value config file");
  sub->add_option("--stem", common.stem, "output file stem (default: subcommand name)");
  for (std::string_view key : config_keys()) {
    const std::string name(key);
    sub->add_option("--" + name, common.flags[name], "overrides config key " + name);
  }
}

RunConfig resolve(const CLI::App* sub, const Common& common) {
  KeyValues overrides;
  for (const auto& [key, value] : common.flags) {
    if (sub->count("--" + key) > 0) overrides[key] = value;
  }
  RunConfig config = common.config_path.empty() ? make_config(overrides) : load_config(common.config_path, overrides);
  apply_threads(resolve_threads(config));
  return config;
}

fs::path output_path(const RunConfig& config, const Common& common, const CLI::App* sub, const char* ext) {
  const std::string stem = common.stem.empty() ? sub->get_name() : common.stem;
  return fs::path(config.out_dir) / (stem + ext);
}

template <typename T>
T required(const std::optional<T>& v, const char* key, const char* subcommand) {
  if (!v) throw Error(ErrorCategory::config, fmt::format("config key '{}' is required by {}", key, subcommand));
  return *v;
}

void announce(const fs::path& path) { fmt::print("wrote {}\n", path.string()); }

int run_basis_info(const CLI::App* sub, const Common& common) {
  const RunConfig config = resolve(sub, common);
  const FockBasis basis(config.model().basis_spec());
  fmt::print("N={} n_ll={} L in [{}, {}]: {} modes, dimension {}\n", config.n, config.n_ll, config.effective_l_min(),
             config.effective_l_max(), basis.mode_count(), basis.size());
  for (int l = config.effective_l_min(); l <= config.effective_l_max(); ++l) {
    fmt::print("  L={:3d}  {}\n", l, basis.block_of(l).size());
  }
  const auto path = output_path(config, common, sub, ".json");
  write_file(path, basis_json(config, basis));
  announce(path);
  return 0;
}

void print_point(const PointResult& r) {
  const SweepPoint& p = r.point;
  fmt::print("omega={:.8f} e0={:.10f} gap={:.4e}\n", p.omega, p.e0, p.gap);
  fmt::print("occupations lam1={:.6f} lam2={:.6f} lam3={:.6f}\n", p.lam1, p.lam2, p.lam3);
  if (r.two_mode) {
    fmt::print("two-mode fidelity={:.6f} P_n:", p.fidelity);
    for (double pn : r.two_mode->probabilities) fmt::print(" {:.4f}", pn);
    fmt::print("\n");
  }
  if (r.qfi) fmt::print("F_Q={:.6f} dphi>={:.6e}\n", p.fq, p.dphi);
  if (!p.error.empty()) fmt::print(stderr, "warning: {}\n", p.error);
}

int run_ground_state(const CLI::App* sub, const Common& common) {
  const RunConfig config = resolve(sub, common);
  const double omega = required(config.omega, "omega", "ground-state");
  const Problem problem(config.model(), config.solver());
  const PointResult r = evaluate_point(problem, omega);
  print_point(r);
  const auto path = output_path(config, common, sub, ".json");
  write_file(path, metrology_json(config, problem, r));
  announce(path);
  return 0;
}

int run_sweep(const CLI::App* sub, const Common& common) {
  const RunConfig config = resolve(sub, common);
  const double lo = required(config.omega_lo, "omega_lo", "sweep");
  const double hi = required(config.omega_hi, "omega_hi", "sweep");
  const Problem problem(config.model(), config.solver());
  const auto points = sweep_omega(problem, lo, hi, config.omega_steps);
  int flagged = 0;
  for (const SweepPoint& p : points) {
    if (p.error.empty()) continue;
    ++flagged;
    fmt::print(stderr, "warning: omega={}: {}\n", p.omega, p.error);
  }
  const auto csv = output_path(config, common, sub, ".csv");
  const auto sidecar = output_path(config, common, sub, ".config");
  write_file(csv, sweep_csv(points));
  write_file(sidecar, to_text(config));
  fmt::print("{} points, {} flagged, dimension {}\n", points.size(), flagged, problem.basis().size());
  announce(csv);
  announce(sidecar);
  return 0;
}

int run_critical(const CLI::App* sub, const Common& common, bool check_l_max) {
  const RunConfig config = resolve(sub, common);
  const double lo = required(config.omega_lo, "omega_lo", "critical");
  const double hi = required(config.omega_hi, "omega_hi", "critical");
  const Problem problem(config.model(), config.solver());
  const CriticalPoint cp = find_critical(problem, lo, hi, config.omega_steps);
  fmt::print("omega_c={:.8f} residual={:.3e} ({} evaluations, dimension {})\n", cp.omega_c, cp.residual,
             cp.evaluations, problem.basis().size());
  print_point(cp.at_critical);
  std::optional<LmaxConvergence> convergence;
  if (check_l_max) {
    convergence = check_l_max_convergence(config.model(), lo, hi, config.solver(), config.omega_steps);
    fmt::print("l_max {} -> {}: omega_c shift {:.3e} ({})\n", convergence->l_max, convergence->l_max + 2,
               convergence->shift, convergence->converged ? "converged" : "NOT converged");
  }
  const auto path = output_path(config, common, sub, ".json");
  write_file(path, critical_json(config, problem, cp, convergence));
  announce(path);
  return 0;
}

int run_width(const CLI::App* sub, const Common& common, std::optional<double> omega_c) {
  const RunConfig config = resolve(sub, common);
  const Problem problem(config.model(), config.solver());
  if (!omega_c) {
    const double lo = required(config.omega_lo, "omega_lo", "width");
    const double hi = required(config.omega_hi, "omega_hi", "width");
    omega_c = find_critical(problem, lo, hi, config.omega_steps).omega_c;
  }
  const WidthResult w = qfi_width(problem, *omega_c);
  fmt::print("omega_c={:.8f} F_Q(omega_c)={:.6f} left half-width={:.6e} ({} evaluations)\n", *omega_c, w.center_value,
             w.width, w.evaluations);
  if (w.peak_off_center) {
    fmt::print(stderr, "warning: F_Q peak {:.6f} exceeds F_Q(omega_c) by more than 1%\n", w.peak);
  }
  const auto path = output_path(config, common, sub, ".json");
  write_file(path, width_json(config, *omega_c, w));
  announce(path);
  return 0;
}

int run_compare(const CLI::App* sub, const Common& common, int ll_a, int ll_b) {
  const RunConfig config = resolve(sub, common);
  const double lo = required(config.omega_lo, "omega_lo", "compare-levels");
  const double hi = required(config.omega_hi, "omega_hi", "compare-levels");
  auto params_for = [&](int levels) {
    RunConfig c = config;
    c.n_ll = levels;
    return c.model();
  };
  const TruncationComparison c =
      compare_truncations(params_for(ll_a), params_for(ll_b), lo, hi, config.solver(), config.omega_steps);
  fmt::print("({},{}): omega_c {:.8f} -> {:.8f}, shift {:.4e}; F_Q at omega_c_a {:.6f} vs {:.6f}, change {:.4e}\n",
             c.ll_a, c.ll_b, c.omega_c_a, c.omega_c_b, c.omega_shift, c.fq_a, c.fq_b, c.fq_change);
  const auto path = output_path(config, common, sub, ".json");
  write_file(path, comparison_json(config, c));
  announce(path);
  return 0;
}

int run_spectrum(const CLI::App* sub, const Common& common) {
  const RunConfig config = resolve(sub, common);
  if (config.a != 0.0) fmt::print(stderr, "warning: a = {} ignored; spectra are for the isotropic trap\n", config.a);
  const Problem problem(config.model(), config.solver());
  IsotropicSpectrum s = isotropic_spectrum_per_l(problem, config.omega.value_or(0.0));
  if (!config.omega && !std::isnan(s.omega_1)) s = isotropic_spectrum_per_l(problem, s.omega_1);
  fmt::print("omega_1={:.10f} (L=0 -> L={}), energies at omega={:.10f}:\n", s.omega_1, s.l_jump, s.omega);
  for (const BlockEnergy& b : s.blocks) fmt::print("  L={:3d}  dim={:6d}  E={:.12f}\n", b.l, b.dimension, b.energy);
  const auto path = output_path(config, common, sub, ".json");
  write_file(path, spectrum_json(config, s));
  announce(path);
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Exact diagonalization of bosons in a rotating anisotropic trap"};
  app.require_subcommand(1);

  Common common;
  auto* basis_info = app.add_subcommand("basis-info", "basis dimension and L-block sizes");
  auto* ground = app.add_subcommand("ground-state", "ground state, natural orbitals, two-mode projection and F_Q");
  auto* sweep = app.add_subcommand("sweep", "CSV of observables over an omega grid");
  auto* critical = app.add_subcommand("critical", "critical rotation rate in [omega_lo, omega_hi]");
  auto* width = app.add_subcommand("width", "left half-width of F_Q(omega) at omega_c");
  auto* compare = app.add_subcommand("compare-levels", "fractional changes between two Landau-level truncations");
  auto* spectrum = app.add_subcommand("spectrum-per-l", "lowest energy per L block of the isotropic trap");
  auto* convert = app.add_subcommand("convert-g", "g = sqrt(8 pi) a / lambda_z");
  for (auto* sub : {basis_info, ground, sweep, critical, width, compare, spectrum}) add_common(sub, common);

  bool check_l_max = false;
  critical->add_flag("--check-lmax", check_l_max, "also solve with l_max + 2 and report the shift");
  std::optional<double> omega_c;
  width->add_option("--omega-c", omega_c, "skip the critical search and use this rate");
  int ll_a = 1, ll_b = 2;
  compare->add_option("--ll-a", ll_a, "lower truncation")->capture_default_str();
  compare->add_option("--ll-b", ll_b, "higher truncation")->capture_default_str();
  double length_a = 0.0, lambda_z = 0.0;
  convert->add_option("--a-length", length_a, "scattering length")->required();
  convert->add_option("--lambda-z", lambda_z, "axial oscillator length, same unit")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? 0 : 2;
  }

  try {
    if (*basis_info) return run_basis_info(basis_info, common);
    if (*ground) return run_ground_state(ground, common);
    if (*sweep) return run_sweep(sweep, common);
    if (*critical) return run_critical(critical, common, check_l_max);
    if (*width) return run_width(width, common, omega_c);
    if (*compare) return run_compare(compare, common, ll_a, ll_b);
    if (*spectrum) return run_spectrum(spectrum, common);
    if (*convert) {
      fmt::print("{}\n", convert_g(length_a, lambda_z));
      return 0;
    }
  } catch (const Error& e) {
    fmt::print(stderr, "error [{}]: {}\n", category_name(e.category()), e.what());
    return exit_code(e.category());
  } catch (const std::exception& e) {
    fmt::print(stderr, "error: {}\n", e.what());
    return 1;
  }
  return 0;
}
