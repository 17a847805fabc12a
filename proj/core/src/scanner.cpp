#include "vortexed/scanner.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

#include <fmt/format.h>

#include "vortexed/error.hpp"

namespace vortexed {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

void require_rate_range(double lo, double hi, const char* where) {
  if (!(lo >= 0.0 && lo < hi && hi < 1.0)) {
    throw Error(ErrorCategory::invalid_argument,
                fmt::format("{}: need 0 <= omega_lo < omega_hi < 1, got [{}, {}]", where, lo, hi));
  }
}

SweepPoint blank_point(const ModelParams& params, double omega) {
  SweepPoint p;
  p.omega = omega;
  p.g = params.g;
  p.anisotropy = params.anisotropy;
  p.n_ll = params.landau_levels;
  p.l_min = params.l_min;
  p.l_max = params.l_max;
  p.e0 = p.gap = p.lam1 = p.lam2 = p.lam3 = kNaN;
  p.fidelity = p.fq = p.dphi = kNaN;
  return p;
}

void append_error(SweepPoint& p, const std::string& what) {
  if (!p.error.empty()) p.error += "; ";
  p.error += what;
}

void complete_point(const Problem& problem, PointResult& r) {
  const auto psi = r.ground_state();
  try {
    r.two_mode = two_mode_decompose(psi, problem.basis(), r.orbitals);
    r.point.fidelity = r.two_mode->fidelity;
  } catch (const Error& e) {
    append_error(r.point, e.what());
  }
  try {
    r.qfi = qfi(psi, problem.basis(), r.orbitals);
    r.point.fq = r.qfi->fq;
    r.point.dphi = r.qfi->dphi_bound;
  } catch (const Error& e) {
    append_error(r.point, e.what());
  }
}

std::vector<double> copy_vector(std::span<const double> v) { return {v.begin(), v.end()}; }

}  // namespace

BasisSpec ModelParams::basis_spec() const noexcept {
  return {particles, landau_levels, l_min, l_max, basis_cap};
}

int default_l_min(int landau_levels) noexcept { return landau_levels <= 1 ? 0 : -2; }

int default_l_max(int particles) noexcept { return particles + 4; }

Problem::Problem(const ModelParams& params, const SolverSettings& solver)
    : params_(params), solver_(solver), basis_(std::make_unique<FockBasis>(params.basis_spec())) {
  if (params.g < 0.0 || params.anisotropy < 0.0) {
    throw Error(ErrorCategory::invalid_argument, "problem: g and A must be non-negative");
  }
  const auto tables = build_tables(basis_->modes());
  parts_ = assemble(*basis_, tables);
}

PointResult evaluate_point(const Problem& problem, double omega, std::span<const double> warm_start,
                           Detail detail) {
  PointResult r;
  r.point = blank_point(problem.params(), omega);

  LanczosOptions options;
  options.count = static_cast<int>(std::min<std::size_t>(2, problem.basis().size()));
  options.tol = problem.solver().tol;
  options.seed = problem.solver().seed;
  options.dense_fallback = problem.solver().dense_fallback;
  r.eigen = lowest_eigenpairs(problem.parts(), problem.couplings(omega), options, warm_start);

  SweepPoint& p = r.point;
  p.e0 = r.eigen.eigenvalues[0];
  if (r.eigen.eigenvalues.size() > 1) p.gap = r.eigen.eigenvalues[1] - r.eigen.eigenvalues[0];
  p.converged = r.eigen.all_converged();
  if (!p.converged) {
    const double worst = *std::max_element(r.eigen.residual_norms.begin(), r.eigen.residual_norms.end());
    append_error(p, fmt::format("eigensolver residual {:.3e} above tol {:.1e}", worst, options.tol));
  }

  r.orbitals = natural_orbitals(spdm(r.ground_state(), problem.basis()), problem.basis().modes());
  const auto& occ = r.orbitals.occupations;
  p.lam1 = occ.size() > 0 ? occ[0] : 0.0;
  p.lam2 = occ.size() > 1 ? occ[1] : 0.0;
  p.lam3 = occ.size() > 2 ? occ[2] : 0.0;

  const auto even = r.orbitals.leading(Parity::even);
  const auto odd = r.orbitals.leading(Parity::odd);
  r.signed_difference = (even ? occ[*even] : 0.0) - (odd ? occ[*odd] : 0.0);

  if (detail == Detail::full) complete_point(problem, r);
  return r;
}

std::vector<SweepPoint> sweep_omega(const Problem& problem, double lo, double hi, int steps) {
  require_rate_range(lo, hi, "sweep_omega");
  if (steps < 2) throw Error(ErrorCategory::invalid_argument, "sweep_omega: steps must be >= 2");

  std::vector<SweepPoint> out;
  out.reserve(static_cast<std::size_t>(steps));
  std::vector<double> warm;
  for (int i = 0; i < steps; ++i) {
    const double omega = i == steps - 1 ? hi : lo + (hi - lo) * i / (steps - 1);
    try {
      PointResult r = evaluate_point(problem, omega, warm, Detail::full);
      warm = copy_vector(r.ground_state());
      out.push_back(std::move(r.point));
    } catch (const Error& e) {
      SweepPoint p = blank_point(problem.params(), omega);
      p.converged = false;
      p.error = e.what();
      out.push_back(std::move(p));
      warm.clear();
    }
  }
  return out;
}

CriticalPoint find_critical(const Problem& problem, double lo, double hi, int coarse_steps) {
  require_rate_range(lo, hi, "find_critical");
  if (coarse_steps < 2) throw Error(ErrorCategory::invalid_argument, "find_critical: coarse_steps must be >= 2");

  CriticalPoint cp;
  const double s_tol = 1e-6 * problem.params().particles;

  // Coarse scan for the first + -> - change of the signed difference.
  double a = 0.0, fa = 0.0, b = 0.0, fb = 0.0;
  std::vector<double> warm_a, warm;
  bool found = false;
  {
    double prev_omega = 0.0, prev_s = 0.0;
    std::vector<double> prev_vec;
    for (int i = 0; i < coarse_steps; ++i) {
      const double omega = i == coarse_steps - 1 ? hi : lo + (hi - lo) * i / (coarse_steps - 1);
      PointResult r = evaluate_point(problem, omega, warm, Detail::occupations);
      ++cp.evaluations;
      warm = copy_vector(r.ground_state());
      if (i > 0 && prev_s > 0.0 && r.signed_difference <= 0.0) {
        a = prev_omega;
        fa = prev_s;
        b = omega;
        fb = r.signed_difference;
        warm_a = std::move(prev_vec);
        found = true;
        if (r.signed_difference == 0.0) {
          a = b = omega;
          fa = 0.0;
        }
        break;
      }
      prev_omega = omega;
      prev_s = r.signed_difference;
      prev_vec = warm;
    }
  }
  if (!found) {
    throw Error(ErrorCategory::no_crossing,
                fmt::format("no sign change of lambda_even - lambda_odd in [{}, {}] over {} points", lo, hi,
                            coarse_steps));
  }

  // Bisection down to the requested width, then Illinois false position
  // until the residual is small.
  PointResult best;
  bool have_best = false;
  double best_abs = std::numeric_limits<double>::infinity();
  int side = 0;
  warm = warm_a;
  for (int it = 0; it < 200 && a < b; ++it) {
    const bool regula = b - a <= 2e-6;
    double x = 0.5 * (a + b);
    if (regula) {
      x = a - fa * (b - a) / (fb - fa);
      if (!(x > a && x < b)) x = 0.5 * (a + b);
    }
    PointResult r = evaluate_point(problem, x, warm, Detail::occupations);
    ++cp.evaluations;
    warm = copy_vector(r.ground_state());
    const double fx = r.signed_difference;
    const bool accept = std::abs(fx) <= s_tol && b - a <= 2e-6;
    if (std::abs(fx) < best_abs || accept) {
      best_abs = std::abs(fx);
      best = std::move(r);
      have_best = true;
    }
    if (accept) break;
    if (fx > 0.0) {
      a = x;
      fa = fx;
      if (regula && side == 1) fb *= 0.5;
      side = 1;
    } else {
      b = x;
      fb = fx;
      if (regula && side == -1) fa *= 0.5;
      side = -1;
    }
    if (b - a <= 1e-14) break;
  }
  if (!have_best) {
    best = evaluate_point(problem, a, warm_a, Detail::occupations);
    ++cp.evaluations;
  }

  cp.omega_c = best.point.omega;
  cp.bracket_lo = a;
  cp.bracket_hi = b;
  cp.residual = best.signed_difference;
  complete_point(problem, best);
  cp.at_critical = std::move(best);
  return cp;
}

WidthResult left_half_width(const std::function<double(double)>& f, double center, double min_step, double rel_tol,
                            double floor) {
  if (!(min_step > 0.0) || !(rel_tol > 0.0) || !(center > floor)) {
    throw Error(ErrorCategory::invalid_argument, "left_half_width: need min_step > 0, rel_tol > 0, center > floor");
  }
  WidthResult w;
  w.center_value = f(center);
  w.peak = w.center_value;
  w.evaluations = 1;

  double inside = center;
  double outside = center;
  bool dropped = false;
  for (double step = min_step;; step *= 2.0) {
    const double x = std::max(center - step, floor);
    const double v = f(x);
    ++w.evaluations;
    if (v < 0.5 * w.peak) {
      outside = x;
      dropped = true;
      break;
    }
    w.peak = std::max(w.peak, v);
    inside = x;
    if (x == floor) break;
  }
  if (!dropped) {
    throw Error(ErrorCategory::no_crossing,
                fmt::format("profile does not fall to half its peak between {} and {}", floor, center));
  }

  while (inside - outside > rel_tol * (center - inside) && inside - outside > 1e-15) {
    const double mid = 0.5 * (inside + outside);
    const double v = f(mid);
    ++w.evaluations;
    if (v < 0.5 * w.peak) {
      outside = mid;
    } else {
      w.peak = std::max(w.peak, v);
      inside = mid;
    }
  }
  w.omega_half = 0.5 * (inside + outside);
  w.width = center - w.omega_half;
  w.peak_off_center = w.peak > 1.01 * w.center_value;
  return w;
}

WidthResult qfi_width(const Problem& problem, double omega_c) {
  std::vector<double> warm;
  auto fq = [&](double omega) {
    PointResult r = evaluate_point(problem, omega, warm, Detail::full);
    warm = copy_vector(r.ground_state());
    if (!r.qfi) throw Error(ErrorCategory::inconsistent_orbitals, r.point.error);
    return r.point.fq;
  };
  return left_half_width(fq, omega_c);
}

TruncationComparison compare_truncations(const ModelParams& a, const ModelParams& b, double lo, double hi,
                                         const SolverSettings& solver, int coarse_steps) {
  if (a.landau_levels > b.landau_levels) {
    throw Error(ErrorCategory::invalid_argument,
                fmt::format("compare_truncations: ll_a = {} exceeds ll_b = {}", a.landau_levels, b.landau_levels));
  }
  TruncationComparison out;
  out.ll_a = a.landau_levels;
  out.ll_b = b.landau_levels;

  const Problem pa(a, solver);
  const CriticalPoint ca = find_critical(pa, lo, hi, coarse_steps);
  out.omega_c_a = ca.omega_c;
  out.fq_a = ca.at_critical.point.fq;

  const bool same = a.particles == b.particles && a.g == b.g && a.anisotropy == b.anisotropy &&
                    a.landau_levels == b.landau_levels && a.l_min == b.l_min && a.l_max == b.l_max;
  if (same) {
    out.omega_c_b = out.omega_c_a;
    out.fq_b = out.fq_a;
  } else {
    const Problem pb(b, solver);
    out.omega_c_b = find_critical(pb, lo, hi, coarse_steps).omega_c;
    out.fq_b = evaluate_point(pb, out.omega_c_a, {}, Detail::full).point.fq;
  }
  out.omega_shift = std::abs(out.omega_c_b - out.omega_c_a) / out.omega_c_a;
  out.fq_change = same ? 0.0 : std::abs(out.fq_b - out.fq_a) / out.fq_b;
  return out;
}

IsotropicSpectrum isotropic_spectrum_per_l(const Problem& problem, double omega) {
  const auto& params = problem.params();
  const FockBasis& basis = problem.basis();
  const Couplings at_rest{0.0, params.g, 0.0};

  IsotropicSpectrum out;
  out.omega = omega;
  for (int l = params.l_min; l <= params.l_max; ++l) {
    const IndexRange range = basis.block_of(l);
    if (range.empty()) continue;
    const HamiltonianParts block = restrict_to(problem.parts(), range);
    LanczosOptions options;
    options.count = 1;
    options.tol = problem.solver().tol;
    options.seed = problem.solver().seed;
    options.dense_fallback = problem.solver().dense_fallback;
    const EigenResult r = lowest_eigenpairs(block, at_rest, options);
    out.blocks.push_back({l, range.size(), r.eigenvalues[0], r.eigenvalues[0] - omega * l});
  }

  out.omega_1 = kNaN;
  out.l_jump = 0;
  const auto zero = std::find_if(out.blocks.begin(), out.blocks.end(), [](const BlockEnergy& b) { return b.l == 0; });
  if (zero == out.blocks.end()) return out;
  double best = std::numeric_limits<double>::infinity();
  for (const BlockEnergy& b : out.blocks) {
    if (b.l <= 0) continue;
    const double rate = (b.e_static - zero->e_static) / b.l;
    // Equal rates within rounding go to the larger L.
    const double slack = 1e-10 * std::max(1.0, std::abs(rate));
    if (rate <= best + slack) {
      best = std::min(best, rate);
      out.l_jump = b.l;
    }
  }
  if (out.l_jump != 0) out.omega_1 = best;
  return out;
}

double feder_g_max(int particles) noexcept { return 6.92 * std::pow(static_cast<double>(particles), -1.046); }

ValidityReport validity_diagnostics(int particles, double g, double omega) noexcept {
  ValidityReport r;
  r.ng = particles * g;
  r.lll_scale = omega < 1.0 ? 2.0 * std::numbers::pi / (1.0 - omega) : std::numeric_limits<double>::infinity();
  r.lll_ratio = r.ng / r.lll_scale;
  r.g_max = feder_g_max(particles);
  r.g_ratio = g / r.g_max;
  return r;
}

LmaxConvergence check_l_max_convergence(const ModelParams& params, double lo, double hi, const SolverSettings& solver,
                                        int coarse_steps, double threshold) {
  LmaxConvergence out;
  out.l_max = params.l_max;
  out.omega_c = find_critical(Problem(params, solver), lo, hi, coarse_steps).omega_c;
  ModelParams wider = params;
  wider.l_max += 2;
  out.omega_c_wider = find_critical(Problem(wider, solver), lo, hi, coarse_steps).omega_c;
  out.shift = std::abs(out.omega_c_wider - out.omega_c);
  out.converged = out.shift < threshold;
  return out;
}

}  // namespace vortexed
