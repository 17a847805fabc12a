#pragma once

#include <cstdint>
#include <functional>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "vortexed/basis.hpp"
#include "vortexed/eigensolver.hpp"
#include "vortexed/hamiltonian.hpp"
#include "vortexed/observables.hpp"

namespace vortexed {

struct ModelParams {
  int particles = 12;
  double g = 0.5;
  double anisotropy = 0.03;
  int landau_levels = 1;
  int l_min = 0;
  int l_max = 16;
  std::size_t basis_cap = 50'000'000;

  BasisSpec basis_spec() const noexcept;
};

/// 0 in the lowest Landau level, -2 (one anisotropy step below zero) otherwise.
int default_l_min(int landau_levels) noexcept;
/// N + 4.
int default_l_max(int particles) noexcept;

struct SolverSettings {
  double tol = 1e-10;
  std::uint64_t seed = 1;
  std::size_t dense_fallback = 400;
};

/// Basis and Hamiltonian pieces for one parameter set, built once and reused
/// at every rotation rate.
class Problem {
 public:
  explicit Problem(const ModelParams& params, const SolverSettings& solver = {});

  const ModelParams& params() const noexcept { return params_; }
  const SolverSettings& solver() const noexcept { return solver_; }
  const FockBasis& basis() const noexcept { return *basis_; }
  const HamiltonianParts& parts() const noexcept { return parts_; }
  Couplings couplings(double omega) const noexcept { return {omega, params_.g, params_.anisotropy}; }

 private:
  ModelParams params_;
  SolverSettings solver_;
  std::unique_ptr<const FockBasis> basis_;
  HamiltonianParts parts_;
};

/// One row of a sweep. Quantities that could not be computed are NaN and
/// `error` says why.
struct SweepPoint {
  double omega = 0.0;
  double g = 0.0;
  double anisotropy = 0.0;
  int n_ll = 0;
  int l_min = 0;
  int l_max = 0;
  double e0 = 0.0;
  double gap = 0.0;
  double lam1 = 0.0;
  double lam2 = 0.0;
  double lam3 = 0.0;
  double fidelity = 0.0;
  double fq = 0.0;
  double dphi = 0.0;
  bool converged = true;
  std::string error;
};

enum class Detail { occupations, full };

struct PointResult {
  SweepPoint point;
  EigenResult eigen;
  NaturalOrbitals orbitals;
  /// Leading even-parity occupation minus leading odd-parity occupation.
  double signed_difference = 0.0;
  std::optional<TwoModeDecomposition> two_mode;
  std::optional<QfiResult> qfi;

  std::span<const double> ground_state() const noexcept { return eigen.vector(0); }
};

/// Ground state, gap and natural orbitals at one rotation rate; with
/// Detail::full also the two-mode projection and F_Q.
PointResult evaluate_point(const Problem& problem, double omega, std::span<const double> warm_start = {},
                           Detail detail = Detail::full);

/// `steps` equally spaced rates over [lo, hi], each solve warm-started from
/// the previous ground state. Requires 0 <= lo < hi < 1 and steps >= 2.
std::vector<SweepPoint> sweep_omega(const Problem& problem, double lo, double hi, int steps);

struct CriticalPoint {
  double omega_c = 0.0;
  double bracket_lo = 0.0;
  double bracket_hi = 0.0;
  double residual = 0.0;  // signed occupation difference at omega_c
  int evaluations = 0;
  PointResult at_critical;
};

/// Root of lambda(even) - lambda(odd) in [lo, hi]. A coarse scan of
/// `coarse_steps` points finds the first change from positive to
/// non-positive. Bisection narrows that step to width 2e-6, then Illinois
/// false position runs until the residual is at most 1e-6 * N.
/// Throws no_crossing if the scan sees no sign change.
CriticalPoint find_critical(const Problem& problem, double lo, double hi, int coarse_steps = 200);

struct WidthResult {
  double width = 0.0;       // center - omega_half
  double omega_half = 0.0;
  double peak = 0.0;        // largest value seen left of and at the center
  double center_value = 0.0;
  bool peak_off_center = false;  // peak exceeds center_value by more than 1%
  int evaluations = 0;
};

/// Left half-width of a peaked profile f around `center`. Steps left by
/// min_step * 2^k until f drops below half the running peak, then bisects
/// the last step to relative precision rel_tol. Throws no_crossing if f
/// never halves before `floor`.
WidthResult left_half_width(const std::function<double(double)>& f, double center, double min_step = 1e-7,
                            double rel_tol = 1e-4, double floor = 0.0);

/// left_half_width of F_Q(omega) for the problem.
WidthResult qfi_width(const Problem& problem, double omega_c);

struct TruncationComparison {
  int ll_a = 0;
  int ll_b = 0;
  double omega_c_a = 0.0;
  double omega_c_b = 0.0;
  double fq_a = 0.0;  // F_Q of truncation a at omega_c_a
  double fq_b = 0.0;  // F_Q of truncation b at omega_c_a
  double omega_shift = 0.0;  // |omega_c_b - omega_c_a| / omega_c_a
  double fq_change = 0.0;    // |fq_b - fq_a| / fq_b
};

/// Requires a.landau_levels <= b.landau_levels. Identical parameter sets give
/// exactly zero changes.
TruncationComparison compare_truncations(const ModelParams& a, const ModelParams& b, double lo, double hi,
                                         const SolverSettings& solver = {}, int coarse_steps = 200);

struct BlockEnergy {
  int l = 0;
  std::size_t dimension = 0;
  double e_static = 0.0;  // lowest energy of the block at omega = 0
  double energy = 0.0;    // e_static - omega * l
};

struct IsotropicSpectrum {
  double omega = 0.0;
  std::vector<BlockEnergy> blocks;
  /// Lowest rate at which some L > 0 block reaches the L = 0 energy, and
  /// that L. NaN and 0 when the window lacks L = 0 or any L > 0.
  double omega_1 = 0.0;
  int l_jump = 0;
};

/// Lowest energy of every non-empty L block of the rotationally symmetric
/// Hamiltonian. The anisotropy of the problem is ignored.
IsotropicSpectrum isotropic_spectrum_per_l(const Problem& problem, double omega);

struct ValidityReport {
  double ng = 0.0;
  double lll_scale = 0.0;  // 2 pi / (1 - omega)
  double lll_ratio = 0.0;  // ng / lll_scale
  double g_max = 0.0;      // 6.92 N^-1.046
  double g_ratio = 0.0;    // g / g_max
};

double feder_g_max(int particles) noexcept;

/// Advisory numbers only.
ValidityReport validity_diagnostics(int particles, double g, double omega) noexcept;

struct LmaxConvergence {
  int l_max = 0;
  double omega_c = 0.0;
  double omega_c_wider = 0.0;  // with l_max + 2
  double shift = 0.0;
  bool converged = false;      // shift < threshold
};

LmaxConvergence check_l_max_convergence(const ModelParams& params, double lo, double hi,
                                        const SolverSettings& solver = {}, int coarse_steps = 200,
                                        double threshold = 1e-4);

}  // namespace vortexed
