// Acceptance suite. Prints one PASS/FAIL line per criterion, with indented
// detail lines, and exits non-zero if any criterion fails.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <random>
#include <string>
#include <vector>

#include <fmt/format.h>

#include "oracles.hpp"
#include "vortexed/eigensolver.hpp"
#include "vortexed/error.hpp"
#include "vortexed/report.hpp"
#include "vortexed/scanner.hpp"

using namespace vortexed;

namespace {

// Scan window for every critical search.
constexpr double kScanLo = 0.5;
constexpr double kScanHi = 0.99;
constexpr int kCoarseSteps = 200;

constexpr double kOmegaTol = 0.005;
constexpr double kOmegaLll = 0.776;
constexpr double kOmega2ll = 0.823;
constexpr double kOmegaTuned = 0.938;
constexpr double kLmaxShift = 1e-4;

constexpr double kFidelityTol = 0.03;
constexpr double kFidelityLll = 0.83;
constexpr double kFidelity2ll = 0.70;
constexpr double kFidelityTuned = 0.80;

constexpr double kMaxOmegaShift = 0.06;
constexpr double kMinFqChange = 10.0;

constexpr double kWidthFactor = 3.0;
constexpr double kWidthTuned = 5e-3;
constexpr double kWidthStrong = 5e-5;

constexpr double kDegeneracyTol = 1e-8;

constexpr double kKrylovTol = 1e-9;
constexpr std::size_t kKrylovMaxDim = 2000;
constexpr double kGridTol = 1e-8;
constexpr double kClosedFormRelTol = 1e-13;  // rounding level
constexpr double kQfiTol = 1e-9;
constexpr double kRotateTol = 1e-9;
constexpr double kTraceTol = 1e-10;
constexpr double kPsdTol = 1e-12;

struct Outcome {
  bool pass = true;
  std::vector<std::string> details;

  void require(bool ok, std::string line) {
    pass = pass && ok;
    details.push_back(fmt::format("{} {}", ok ? "ok  " : "MISS", line));
  }
};

int failures = 0;

void report(const std::string& name, const std::function<Outcome()>& body) {
  const auto start = std::chrono::steady_clock::now();
  Outcome out;
  try {
    out = body();
  } catch (const std::exception& e) {
    out.pass = false;
    out.details.push_back(fmt::format("exception: {}", e.what()));
  }
  const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  if (!out.pass) ++failures;
  fmt::print("{} {} ({:.1f} s)\n", out.pass ? "PASS" : "FAIL", name, secs);
  for (const auto& d : out.details) fmt::print("    {}\n", d);
  std::fflush(stdout);
}

ModelParams model(int n_ll, double g) {
  ModelParams p;
  p.particles = 12;
  p.g = g;
  p.anisotropy = 0.03;
  p.landau_levels = n_ll;
  p.l_min = default_l_min(n_ll);
  p.l_max = default_l_max(12);
  return p;
}

bool within(double value, double target, double tol) { return std::abs(value - target) <= tol; }

// Every ground state the suite computes goes through this check.
struct SpdmAudit {
  int states = 0;
  double worst_trace = 0.0;
  double worst_eigenvalue = 0.0;

  void add(std::span<const double> psi, const FockBasis& basis) {
    const auto rho = spdm(psi, basis);
    worst_trace = std::max(worst_trace, std::abs(rho.trace() - basis.spec().particles));
    const Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(rho.matrix, Eigen::EigenvaluesOnly);
    worst_eigenvalue = std::min(worst_eigenvalue, es.eigenvalues().minCoeff());
    ++states;
  }
};

SpdmAudit audit;

struct CriticalRun {
  ModelParams params;
  CriticalPoint critical;
};

CriticalRun run_critical(const ModelParams& params) {
  const Problem problem(params);
  CriticalRun run{params, find_critical(problem, kScanLo, kScanHi, kCoarseSteps)};
  audit.add(run.critical.at_critical.ground_state(), problem.basis());
  return run;
}

std::string describe_pn(const TwoModeDecomposition& tm) {
  std::string s;
  for (double p : tm.probabilities) s += fmt::format(" {:.4f}", p);
  return s;
}

// P_n falls from both ends toward an interior minimum.
bool bat_shaped(const std::vector<double>& p) {
  if (p.size() < 3) return false;
  const auto argmin = static_cast<std::size_t>(std::min_element(p.begin(), p.end()) - p.begin());
  if (argmin == 0 || argmin + 1 == p.size()) return false;
  for (std::size_t n = 1; n <= argmin; ++n)
    if (p[n] > p[n - 1]) return false;
  for (std::size_t n = argmin + 1; n < p.size(); ++n)
    if (p[n] < p[n - 1]) return false;
  return true;
}

Outcome critical_outcome(const CriticalRun& run, double target) {
  Outcome out;
  const auto& c = run.critical;
  out.require(within(c.omega_c, target, kOmegaTol),
              fmt::format("Omega_c = {:.6f}, target {} +- {} (n_LL={}, g={}, L in [{}, {}], residual {:.1e})",
                          c.omega_c, target, kOmegaTol, run.params.landau_levels, run.params.g, run.params.l_min,
                          run.params.l_max, c.residual));
  return out;
}

Outcome oracle_suite() {
  Outcome out;

  {  // (a)
    double worst = 0.0;
    std::size_t largest = 0;
    for (const BasisSpec& spec : {BasisSpec{6, 2, -2, 10}, BasisSpec{8, 1, 0, 16}, BasisSpec{6, 3, -2, 8},
                                  BasisSpec{10, 1, 0, 14}}) {
      const FockBasis basis(spec);
      if (basis.size() > kKrylovMaxDim) continue;
      largest = std::max(largest, basis.size());
      const auto parts = assemble(basis, build_tables(basis.modes()));
      for (const Couplings c : {Couplings{0.6, 0.5, 0.03}, Couplings{0.85, 0.2, 0.03}, Couplings{0.8, 1.0, 0.0}}) {
        LanczosOptions o;
        o.count = 4;
        o.dense_fallback = 0;
        const auto krylov = lowest_eigenpairs(parts, c, o);
        const auto dense = dense_spectrum(parts, c);
        for (std::size_t i = 0; i < 4; ++i) worst = std::max(worst, std::abs(krylov.eigenvalues[i] - dense[i]));
        audit.add(krylov.vector(0), basis);
      }
    }
    out.require(worst <= kKrylovTol,
                fmt::format("(a) Krylov vs dense: max |dE| = {:.2e} <= {:.0e}, dims up to {}", worst, kKrylovTol,
                            largest));
  }

  {  // (b)
    const auto modes = enumerate_modes(3, 4);
    oracle::CartesianGrid grid(0.1, 9.0);
    std::mt19937_64 rng(2024);
    std::uniform_int_distribution<std::size_t> pick(0, modes.size() - 1);
    double worst = 0.0;
    int samples = 0;
    while (samples < 60) {
      const SpMode k = modes[pick(rng)], l = modes[pick(rng)], p = modes[pick(rng)];
      const int mq = k.m + l.m - p.m;
      const SpMode q{modes[pick(rng)].n, mq};
      if (q.landau_index() > 2 || std::abs(mq) > 6) continue;
      worst = std::max(worst, std::abs(interaction_element(k, l, p, q) - grid.interaction(k, l, p, q)));
      ++samples;
    }
    for (std::size_t i = 0; i < 20; ++i) {
      const SpMode k = modes[pick(rng)], p = modes[pick(rng)];
      worst = std::max(worst, std::abs(anisotropy_element(k, p) - grid.anisotropy(k, p)));
    }
    out.require(worst <= kGridTol,
                fmt::format("(b) matrix elements vs Cartesian integration: max dev {:.2e} <= {:.0e} over {} samples",
                            worst, kGridTol, samples + 20));
  }

  {  // (c)
    double worst = 0.0;
    for (int mk = 0; mk <= 10; ++mk)
      for (int ml = 0; ml <= 10; ++ml)
        for (int mp = 0; mp <= mk + ml && mp <= 10; ++mp) {
          const int mq = mk + ml - mp;
          if (mq > 10) continue;
          const double exact = oracle::lll_interaction(mk, ml, mp, mq);
          const double got = interaction_element({0, mk}, {0, ml}, {0, mp}, {0, mq});
          worst = std::max(worst, std::abs(got - exact) / exact);
        }
    out.require(worst <= kClosedFormRelTol,
                fmt::format("(c) LLL closed form: max rel dev {:.2e} <= {:.0e}, m <= 10", worst, kClosedFormRelTol));
  }

  {  // (d)
    double worst = 0.0;
    int cases = 0;
    for (const BasisSpec& spec : {BasisSpec{2, 2, -2, 4}, BasisSpec{3, 2, -2, 5}, BasisSpec{4, 1, 0, 8},
                                  BasisSpec{4, 2, -2, 6}}) {
      const FockBasis basis(spec);
      const auto parts = assemble(basis, build_tables(basis.modes()));
      for (double omega : {0.55, 0.75, 0.9}) {
        const auto r = dense_eigenpairs(parts, {omega, 0.5, 0.03}, 1);
        const auto no = natural_orbitals(spdm(r.vector(0), basis), basis.modes());
        worst = std::max(worst, std::abs(qfi(r.vector(0), basis, no).fq - qfi_by_rotation(r.vector(0), basis, no).fq));
        audit.add(r.vector(0), basis);
        ++cases;
      }
    }
    out.require(worst <= kQfiTol,
                fmt::format("(d) QFI correlator vs rotation path: max |dF| = {:.2e} <= {:.0e}, {} states, N <= 4",
                            worst, kQfiTol, cases));
  }

  {  // (e)
    double worst = 0.0;
    std::uint64_t seed = 100;
    for (const BasisSpec& spec : {BasisSpec{2, 2, -2, 5}, BasisSpec{3, 2, -2, 4}, BasisSpec{3, 1, 0, 7}}) {
      const FockBasis basis(spec);
      for (int trial = 0; trial < 3; ++trial, ++seed) {
        const auto psi = oracle::random_state(basis.size(), seed);
        const auto u = oracle::random_orthogonal(static_cast<int>(basis.mode_count()), seed + 1000);
        const auto rotated = mode_rotate(psi, basis, u);
        const auto expected = oracle::rotate(psi, basis, u, *rotated.space);
        for (std::size_t i = 0; i < expected.size(); ++i)
          worst = std::max(worst, std::abs(rotated.amplitudes[i] - expected[i]));
      }
    }
    out.require(worst <= kRotateTol,
                fmt::format("(e) mode_rotate vs multinomial expansion: max dev {:.2e} <= {:.0e}, N <= 3", worst,
                            kRotateTol));
  }

  {  // (g)
    bool exact = true;
    std::size_t total = 0;
    for (const BasisSpec& spec : {BasisSpec{4, 2, -2, 8}, BasisSpec{6, 1, 0, 10}, BasisSpec{3, 3, -2, 5}}) {
      const FockBasis basis(spec);
      const auto parts = assemble(basis, build_tables(basis.modes()));
      for (double omega : {0.0, 0.55, 0.9}) {
        auto expected = oracle::noninteracting_energies(basis, omega);
        std::sort(expected.begin(), expected.end());
        exact = exact && dense_spectrum(parts, {omega, 0.0, 0.0}) == expected;
        total += expected.size();
      }
    }
    out.require(exact, fmt::format("(g) noninteracting spectrum equals the closed formula bit for bit ({} levels)",
                                   total));
  }

  {  // (f) runs last so it sees every state above
    const Problem problem(ModelParams{6, 0.5, 0.03, 2, -2, 10});
    std::vector<double> warm;
    for (int i = 0; i < 12; ++i) {
      const auto r = evaluate_point(problem, 0.6 + 0.03 * i, warm, Detail::occupations);
      audit.add(r.ground_state(), problem.basis());
      warm.assign(r.ground_state().begin(), r.ground_state().end());
    }
    out.require(audit.worst_trace <= kTraceTol && audit.worst_eigenvalue >= -kPsdTol,
                fmt::format("(f) SPDM trace and PSD on {} states: max |tr - N| = {:.1e}, min eigenvalue {:.1e}",
                            audit.states, audit.worst_trace, audit.worst_eigenvalue));
  }
  return out;
}

}  // namespace

int main() {
  fmt::print("vortexed acceptance suite\n");
  std::fflush(stdout);

  const auto lll = run_critical(model(1, 0.5));
  const auto two = run_critical(model(2, 0.5));
  const auto tuned = run_critical(model(2, 0.2));

  report("critical frequency, lowest Landau level", [&] {
    Outcome out = critical_outcome(lll, kOmegaLll);
    const auto conv = check_l_max_convergence(lll.params, kScanLo, kScanHi, {}, kCoarseSteps, kLmaxShift);
    out.require(conv.converged, fmt::format("L_max {} -> {}: Omega_c {:.6f} -> {:.6f}, shift {:.1e} < {:.0e}",
                                            conv.l_max, conv.l_max + 2, conv.omega_c, conv.omega_c_wider,
                                            conv.shift, kLmaxShift));
    return out;
  });

  report("critical frequency, two Landau levels", [&] { return critical_outcome(two, kOmega2ll); });

  report("tuned regime g = 0.2, two Landau levels", [&] {
    Outcome out = critical_outcome(tuned, kOmegaTuned);
    const auto& tm = tuned.critical.at_critical.two_mode;
    out.require(tm.has_value() && bat_shaped(tm->probabilities),
                fmt::format("bat-shaped P_n:{}", tm ? describe_pn(*tm) : std::string(" unavailable")));
    return out;
  });

  report("two-mode fidelities at Omega_c", [&] {
    Outcome out;
    const auto check = [&](const CriticalRun& run, double target, const char* label) {
      const double f = run.critical.at_critical.point.fidelity;
      out.require(within(f, target, kFidelityTol),
                  fmt::format("{}: fidelity {:.4f}, target {} +- {}", label, f, target, kFidelityTol));
    };
    check(lll, kFidelityLll, "LLL, g=0.5");
    check(two, kFidelity2ll, "2LL, g=0.5");
    check(tuned, kFidelityTuned, "2LL, g=0.2");
    return out;
  });

  report("truncation disagreement, 1 vs 2 Landau levels", [&] {
    Outcome out;
    const auto r = compare_truncations(model(1, 0.5), model(2, 0.5), kScanLo, kScanHi, {}, kCoarseSteps);
    out.require(r.omega_shift <= kMaxOmegaShift,
                fmt::format("dOmega_c/Omega_c = {:.4f} <= {} (Omega_c {:.6f} vs {:.6f})", r.omega_shift,
                            kMaxOmegaShift, r.omega_c_a, r.omega_c_b));
    out.require(r.fq_change >= kMinFqChange,
                fmt::format("dF_Q/F_Q = {:.2f} >= {} (F_Q {:.4f} vs {:.4f} at Omega_c of 1 level)", r.fq_change,
                            kMinFqChange, r.fq_a, r.fq_b));
    return out;
  });

  report("QFI left half-widths, two Landau levels", [&] {
    Outcome out;
    const auto check = [&](const CriticalRun& run, double target) {
      const Problem problem(run.params);
      const auto w = qfi_width(problem, run.critical.omega_c);
      const double ratio = w.width / target;
      out.require(ratio >= 1.0 / kWidthFactor && ratio <= kWidthFactor,
                  fmt::format("g={}: width {:.3e}, target {:.0e} within x{} (peak {:.3f}, F_Q(Omega_c) {:.3f}{})",
                              run.params.g, w.width, target, kWidthFactor, w.peak, w.center_value,
                              w.peak_off_center ? ", peak left of Omega_c" : ""));
    };
    check(tuned, kWidthTuned);
    check(two, kWidthStrong);
    return out;
  });

  report("lowest Landau level degeneracy at the first crossing", [&] {
    Outcome out;
    for (double g : {0.2, 0.5}) {
      ModelParams p{6, g, 0.0, 1, 0, default_l_max(6)};
      const Problem problem(p);
      const auto first = isotropic_spectrum_per_l(problem, 0.0);
      const auto at = isotropic_spectrum_per_l(problem, first.omega_1);
      double lo = 1e300, hi = -1e300;
      for (const auto& b : at.blocks) {
        if (b.l < 0 || b.l > p.particles || b.l % 2 != 0) continue;
        lo = std::min(lo, b.energy);
        hi = std::max(hi, b.energy);
      }
      out.require(hi - lo <= kDegeneracyTol,
                  fmt::format("N=6, g={}: Omega_1 = {:.8f}, spread of E(L=0,2,...,6) = {:.1e} <= {:.0e}", g,
                              first.omega_1, hi - lo, kDegeneracyTol));
    }
    return out;
  });

  report("oracle suite", oracle_suite);

  report("determinism", [&] {
    Outcome out;
    ModelParams p = model(2, 0.5);
    p.particles = 8;
    p.l_max = default_l_max(8);
    const auto first = sweep_csv(sweep_omega(Problem(p), 0.75, 0.9, 16));
    const auto second = sweep_csv(sweep_omega(Problem(p), 0.75, 0.9, 16));
    out.require(first == second, fmt::format("two sweeps of 16 points give byte-identical CSV ({} bytes)",
                                             first.size()));
    return out;
  });

  fmt::print("{} criteria failed\n", failures);
  return failures == 0 ? 0 : 1;
}
