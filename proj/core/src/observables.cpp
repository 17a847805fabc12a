#include "vortexed/observables.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <numeric>
#include <string>
#include <unordered_map>

#include <fmt/format.h>

#include "vortexed/error.hpp"

namespace vortexed {

namespace {

constexpr int kMaxFactorial = 170;

double factorial(int n) {
  static const std::array<double, kMaxFactorial + 1> table = [] {
    std::array<double, kMaxFactorial + 1> t{};
    t[0] = 1.0;
    for (int i = 1; i <= kMaxFactorial; ++i) t[static_cast<std::size_t>(i)] = t[static_cast<std::size_t>(i - 1)] * i;
    return t;
  }();
  return table[static_cast<std::size_t>(n)];
}

double binomial(int n, int k) { return factorial(n) / (factorial(k) * factorial(n - k)); }

double squared_norm(std::span<const double> v) {
  double s = 0.0;
  for (double x : v) s += x * x;
  return s;
}

void require_normalized(std::span<const double> state, double tolerance, const char* where) {
  const double norm2 = squared_norm(state);
  if (std::abs(norm2 - 1.0) > tolerance) {
    throw Error(ErrorCategory::unnormalized_state,
                fmt::format("{}: state norm^2 = {:.3e} deviates from 1", where, norm2));
  }
}

void require_size(std::span<const double> state, std::size_t expected, const char* where) {
  if (state.size() != expected) {
    throw Error(ErrorCategory::dimension_mismatch,
                fmt::format("{}: state has {} amplitudes, basis has {}", where, state.size(), expected));
  }
}

Parity mode_parity(const SpMode& mode) { return (mode.m % 2 == 0) ? Parity::even : Parity::odd; }

int parity_rank(Parity p) {
  switch (p) {
    case Parity::even: return 0;
    case Parity::odd: return 1;
    case Parity::mixed: return 2;
  }
  return 2;
}

void fix_sign(Eigen::Ref<Eigen::VectorXd> v) {
  Eigen::Index arg = 0;
  v.cwiseAbs().maxCoeff(&arg);
  if (v(arg) < 0) v = -v;
}

// Occupation-vector keyed accumulator with insertion-ordered storage, so that
// sums over it are reproducible.
class SparseFockVector {
 public:
  void add(std::span<const Occupation> key, double value) {
    std::string k(reinterpret_cast<const char*>(key.data()), key.size());
    auto [it, inserted] = index_.try_emplace(std::move(k), values_.size());
    if (inserted) values_.push_back(value);
    else values_[it->second] += value;
  }
  double squared_norm() const {
    double s = 0.0;
    for (double v : values_) s += v * v;
    return s;
  }

 private:
  std::unordered_map<std::string, std::size_t> index_;
  std::vector<double> values_;
};

}  // namespace

Spdm spdm(std::span<const double> state, const FockBasis& basis) {
  require_size(state, basis.size(), "spdm");
  require_normalized(state, 1e-10, "spdm");
  const std::size_t M = basis.mode_count();
  Spdm rho;
  rho.particles = basis.spec().particles;
  rho.matrix = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(M), static_cast<Eigen::Index>(M));
  std::vector<Occupation> occ(M);
  for (std::size_t j = 0; j < basis.size(); ++j) {
    const double cj = state[j];
    if (cj == 0.0) continue;
    const auto s = basis.state(j);
    std::copy(s.begin(), s.end(), occ.begin());
    for (std::size_t l = 0; l < M; ++l) {
      if (occ[l] == 0) continue;
      const double remove = std::sqrt(static_cast<double>(occ[l]));
      --occ[l];
      for (std::size_t k = 0; k < M; ++k) {
        const double create = std::sqrt(occ[k] + 1.0);
        ++occ[k];
        if (const auto i = basis.find(occ)) {
          rho.matrix(static_cast<Eigen::Index>(k), static_cast<Eigen::Index>(l)) += state[*i] * cj * remove * create;
        }
        --occ[k];
      }
      ++occ[l];
    }
  }
  // Symmetric up to rounding; make it exact.
  rho.matrix = 0.5 * (rho.matrix + rho.matrix.transpose()).eval();
  return rho;
}

std::optional<std::size_t> NaturalOrbitals::leading(Parity p) const noexcept {
  for (std::size_t i = 0; i < parity.size(); ++i) {
    if (parity[i] == p) return i;
  }
  return std::nullopt;
}

NaturalOrbitals natural_orbitals(const Spdm& rho, std::span<const SpMode> modes, double tie_tolerance) {
  const auto M = rho.matrix.rows();
  if (static_cast<std::size_t>(M) != modes.size()) {
    throw Error(ErrorCategory::dimension_mismatch, "natural_orbitals: SPDM and mode list disagree");
  }
  std::vector<Eigen::Index> even_idx, odd_idx;
  for (Eigen::Index k = 0; k < M; ++k) {
    (mode_parity(modes[static_cast<std::size_t>(k)]) == Parity::even ? even_idx : odd_idx).push_back(k);
  }
  double cross = 0.0;
  for (Eigen::Index a : even_idx) {
    for (Eigen::Index b : odd_idx) cross = std::max(cross, std::abs(rho.matrix(a, b)));
  }
  const double scale = std::max(1.0, std::abs(rho.matrix.trace()));

  std::vector<double> values;
  std::vector<Eigen::VectorXd> vectors;
  std::vector<Parity> parities;

  auto diagonalize_sector = [&](const std::vector<Eigen::Index>& idx, Parity p) {
    if (idx.empty()) return;
    const auto n = static_cast<Eigen::Index>(idx.size());
    Eigen::MatrixXd sub(n, n);
    for (Eigen::Index a = 0; a < n; ++a) {
      for (Eigen::Index b = 0; b < n; ++b) sub(a, b) = rho.matrix(idx[static_cast<std::size_t>(a)], idx[static_cast<std::size_t>(b)]);
    }
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(sub);
    for (Eigen::Index c = 0; c < n; ++c) {
      Eigen::VectorXd full = Eigen::VectorXd::Zero(M);
      for (Eigen::Index a = 0; a < n; ++a) full(idx[static_cast<std::size_t>(a)]) = solver.eigenvectors()(a, c);
      values.push_back(solver.eigenvalues()(c));
      vectors.push_back(std::move(full));
      parities.push_back(p);
    }
  };

  if (cross <= 1e-6 * scale) {
    diagonalize_sector(even_idx, Parity::even);
    diagonalize_sector(odd_idx, Parity::odd);
  } else {
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(rho.matrix);
    for (Eigen::Index c = 0; c < M; ++c) {
      Eigen::VectorXd v = solver.eigenvectors().col(c);
      double even_weight = 0.0;
      for (Eigen::Index a : even_idx) even_weight += v(a) * v(a);
      const Parity p = even_weight > 1.0 - 1e-12 ? Parity::even
                       : even_weight < 1e-12    ? Parity::odd
                                                : Parity::mixed;
      values.push_back(solver.eigenvalues()(c));
      vectors.push_back(std::move(v));
      parities.push_back(p);
    }
  }

  std::vector<std::size_t> order(values.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return values[a] > values[b]; });
  // Within clusters of tied occupations, even parity first.
  for (std::size_t start = 0; start < order.size();) {
    std::size_t end = start + 1;
    while (end < order.size() && values[order[start]] - values[order[end]] <= tie_tolerance) ++end;
    std::stable_sort(order.begin() + static_cast<std::ptrdiff_t>(start), order.begin() + static_cast<std::ptrdiff_t>(end),
                     [&](std::size_t a, std::size_t b) { return parity_rank(parities[a]) < parity_rank(parities[b]); });
    start = end;
  }

  NaturalOrbitals out;
  out.orbitals.resize(M, M);
  for (std::size_t c = 0; c < order.size(); ++c) {
    out.occupations.push_back(values[order[c]]);
    out.parity.push_back(parities[order[c]]);
    out.orbitals.col(static_cast<Eigen::Index>(c)) = vectors[order[c]];
    fix_sign(out.orbitals.col(static_cast<Eigen::Index>(c)));
  }
  return out;
}

// ---------------------------------------------------------------------------

FullFockSpace::FullFockSpace(int particles, std::size_t modes, std::size_t dimension_cap)
    : particles_(particles), modes_(modes) {
  if (particles < 0 || particles > std::numeric_limits<Occupation>::max() || modes == 0) {
    throw Error(ErrorCategory::invalid_argument, "FullFockSpace: invalid particle or mode count");
  }
  // C(N + M - 1, N), guarded against overflow.
  double dim = 1.0;
  for (int i = 1; i <= particles; ++i) dim = dim * static_cast<double>(modes - 1 + static_cast<std::size_t>(i)) / i;
  if (dim > static_cast<double>(dimension_cap)) {
    throw Error(ErrorCategory::dimension_cap_exceeded,
                fmt::format("full Fock space of {} bosons in {} modes has {:.3g} states (cap {})", particles,
                            modes, dim, dimension_cap));
  }
  occupations_.reserve(static_cast<std::size_t>(std::llround(dim)) * modes);
  std::vector<Occupation> current(modes, 0);
  auto fill = [&](auto&& self, std::size_t pos, int remaining) -> void {
    if (pos + 1 == modes) {
      current[pos] = static_cast<Occupation>(remaining);
      occupations_.insert(occupations_.end(), current.begin(), current.end());
      current[pos] = 0;
      return;
    }
    for (int c = 0; c <= remaining; ++c) {
      current[pos] = static_cast<Occupation>(c);
      self(self, pos + 1, remaining - c);
    }
    current[pos] = 0;
  };
  fill(fill, 0, particles);
  index_ = OccupationIndex(occupations_, modes_);
}

namespace {

struct PlaneRotation {
  std::size_t p, q;
  double c, s;  // a+_p -> c a+_p + s a+_q,  a+_q -> -s a+_p + c a+_q
};

// Matrix of the rotation restricted to the (n+1)-dimensional subspace with
// n bosons shared between modes p and q. Entry (a', a) maps |a, n-a> to
// |a', n-a'>.
Eigen::MatrixXd two_mode_block(int n, double c, double s) {
  Eigen::MatrixXd d = Eigen::MatrixXd::Zero(n + 1, n + 1);
  for (int a = 0; a <= n; ++a) {
    const int b = n - a;
    const double norm_in = std::sqrt(factorial(a) * factorial(b));
    for (int i = 0; i <= a; ++i) {
      for (int j = 0; j <= b; ++j) {
        const int out_p = i + j;
        const double coeff = binomial(a, i) * std::pow(c, i) * std::pow(s, a - i) * binomial(b, j) *
                             std::pow(-s, j) * std::pow(c, b - j);
        d(out_p, a) += coeff * std::sqrt(factorial(out_p) * factorial(n - out_p)) / norm_in;
      }
    }
  }
  return d;
}

void apply_rotation(const FullFockSpace& space, const PlaneRotation& rot, std::vector<double>& amps) {
  const int N = space.particles();
  std::vector<Eigen::MatrixXd> blocks(static_cast<std::size_t>(N + 1));
  for (int n = 0; n <= N; ++n) blocks[static_cast<std::size_t>(n)] = two_mode_block(n, rot.c, rot.s);
  std::vector<double> out(amps.size(), 0.0);
  std::vector<Occupation> occ(space.mode_count());
  for (std::size_t i = 0; i < space.size(); ++i) {
    const double x = amps[i];
    if (x == 0.0) continue;
    const auto s = space.state(i);
    std::copy(s.begin(), s.end(), occ.begin());
    const int a = occ[rot.p];
    const int n = a + occ[rot.q];
    const auto& block = blocks[static_cast<std::size_t>(n)];
    for (int ap = 0; ap <= n; ++ap) {
      const double coeff = block(ap, a);
      if (coeff == 0.0) continue;
      occ[rot.p] = static_cast<Occupation>(ap);
      occ[rot.q] = static_cast<Occupation>(n - ap);
      out[*space.find(occ)] += coeff * x;
    }
  }
  amps = std::move(out);
}

Eigen::MatrixXd complete_orthogonal(const Eigen::MatrixXd& u) {
  const auto M = u.rows();
  const auto r = u.cols();
  if (r > M) throw Error(ErrorCategory::invalid_argument, "mode_rotate: more orbitals than modes");
  const Eigen::MatrixXd gram = u.transpose() * u;
  if ((gram - Eigen::MatrixXd::Identity(r, r)).cwiseAbs().maxCoeff() > 1e-10) {
    throw Error(ErrorCategory::invalid_argument, "mode_rotate: orbitals are not orthonormal within 1e-10");
  }
  if (r == M) return u;
  Eigen::HouseholderQR<Eigen::MatrixXd> qr(u);
  Eigen::MatrixXd q = qr.householderQ() * Eigen::MatrixXd::Identity(M, M);
  q.leftCols(r) = u;
  return q;
}

}  // namespace

RotatedState embed(std::span<const double> state, const FockBasis& basis) {
  require_size(state, basis.size(), "embed");
  auto space = std::make_shared<const FullFockSpace>(basis.spec().particles, basis.mode_count());
  RotatedState out{space, std::vector<double>(space->size(), 0.0)};
  for (std::size_t j = 0; j < basis.size(); ++j) out.amplitudes[*space->find(basis.state(j))] = state[j];
  return out;
}

RotatedState mode_rotate(const RotatedState& state, const Eigen::MatrixXd& u) {
  const auto M = static_cast<Eigen::Index>(state.space->mode_count());
  if (u.rows() != M) throw Error(ErrorCategory::dimension_mismatch, "mode_rotate: orbital matrix has wrong row count");
  require_normalized(state.amplitudes, 1e-8, "mode_rotate");

  // Single-particle amplitudes transform with O = U^T. Reduce O to a diagonal
  // sign matrix D by Givens rotations Q_s...Q_1 O = D, so O = Q_1^T...Q_s^T D.
  Eigen::MatrixXd o = complete_orthogonal(u).transpose();
  std::vector<PlaneRotation> rotations;
  for (Eigen::Index j = 0; j < M; ++j) {
    for (Eigen::Index i = M - 1; i > j; --i) {
      const double x = o(i - 1, j);
      const double y = o(i, j);
      if (y == 0.0) continue;
      const double r = std::hypot(x, y);
      const double c = x / r;
      const double s = y / r;
      const Eigen::RowVectorXd top = o.row(i - 1);
      const Eigen::RowVectorXd bottom = o.row(i);
      o.row(i - 1) = c * top + s * bottom;
      o.row(i) = -s * top + c * bottom;
      // Q_i^T is the rotation a+_p -> c a+_p + s a+_q with p = i-1, q = i.
      rotations.push_back({static_cast<std::size_t>(i - 1), static_cast<std::size_t>(i), c, s});
    }
  }

  RotatedState out{state.space, state.amplitudes};
  const FullFockSpace& space = *state.space;
  // D: a+_k -> d_k a+_k.
  for (std::size_t i = 0; i < space.size(); ++i) {
    const auto occ = space.state(i);
    double sign = 1.0;
    for (Eigen::Index k = 0; k < M; ++k) {
      if (o(k, k) < 0 && (occ[static_cast<std::size_t>(k)] % 2) == 1) sign = -sign;
    }
    out.amplitudes[i] *= sign;
  }
  for (auto it = rotations.rbegin(); it != rotations.rend(); ++it) apply_rotation(space, *it, out.amplitudes);

  const double norm2 = squared_norm(out.amplitudes);
  if (std::abs(norm2 - 1.0) > 1e-8) {
    throw Error(ErrorCategory::leakage, fmt::format("mode_rotate: output norm^2 = {:.12f}", norm2));
  }
  return out;
}

RotatedState mode_rotate(std::span<const double> state, const FockBasis& basis, const Eigen::MatrixXd& u) {
  return mode_rotate(embed(state, basis), u);
}

// ---------------------------------------------------------------------------

std::vector<double> two_orbital_amplitudes(std::span<const double> state, const FockBasis& basis,
                                           std::span<const double> psi1, std::span<const double> psi2) {
  require_size(state, basis.size(), "two_orbital_amplitudes");
  const int N = basis.spec().particles;
  if (N > kMaxFactorial) throw Error(ErrorCategory::invalid_argument, "two_orbital_amplitudes: N too large");
  const std::size_t M = basis.mode_count();
  std::vector<double> amps(static_cast<std::size_t>(N + 1), 0.0);
  std::vector<double> poly, factor, next;
  for (std::size_t j = 0; j < basis.size(); ++j) {
    const double cj = state[j];
    if (cj == 0.0) continue;
    const auto occ = basis.state(j);
    // Product over modes of sum_c psi1^{N_k-c} psi2^c sqrt(N_k!)/((N_k-c)! c!) z^c.
    poly.assign(1, 1.0);
    bool vanishes = false;
    for (std::size_t k = 0; k < M && !vanishes; ++k) {
      const int nk = occ[k];
      if (nk == 0) continue;
      factor.assign(static_cast<std::size_t>(nk + 1), 0.0);
      bool any = false;
      for (int c = 0; c <= nk; ++c) {
        const double v = std::pow(psi1[k], nk - c) * std::pow(psi2[k], c) * std::sqrt(factorial(nk)) /
                         (factorial(nk - c) * factorial(c));
        factor[static_cast<std::size_t>(c)] = v;
        any = any || v != 0.0;
      }
      if (!any) {
        vanishes = true;
        break;
      }
      next.assign(poly.size() + factor.size() - 1, 0.0);
      for (std::size_t a = 0; a < poly.size(); ++a) {
        if (poly[a] == 0.0) continue;
        for (std::size_t b = 0; b < factor.size(); ++b) next[a + b] += poly[a] * factor[b];
      }
      poly.swap(next);
    }
    if (vanishes) continue;
    for (std::size_t c = 0; c < poly.size(); ++c) {
      const int ci = static_cast<int>(c);
      amps[c] += cj * std::sqrt(factorial(N - ci) * factorial(ci)) * poly[c];
    }
  }
  return amps;
}

TwoModeDecomposition two_mode_decompose(std::span<const double> state, const FockBasis& basis,
                                        const NaturalOrbitals& orbitals) {
  const int N = basis.spec().particles;
  if (N % 2 != 0) {
    throw Error(ErrorCategory::odd_particle_number,
                fmt::format("two-mode decomposition needs an even particle number, got {}", N));
  }
  if (orbitals.orbitals.cols() < 2) {
    throw Error(ErrorCategory::invalid_argument, "two-mode decomposition needs at least two orbitals");
  }
  const auto amps = two_orbital_amplitudes(state, basis, orbitals.orbital(0), orbitals.orbital(1));
  TwoModeDecomposition out;
  for (int j = 0; j <= N; ++j) {
    const double a = amps[static_cast<std::size_t>(j)];
    if (j % 2 == 0) {
      out.coefficients.push_back(a);
      out.probabilities.push_back(a * a);
      out.fidelity += a * a;
    } else {
      out.odd_weight += a * a;
    }
  }
  return out;
}

QfiResult make_qfi_result(double mean, double second_moment) {
  QfiResult r;
  r.mean_n1 = mean;
  r.var_n1 = std::max(0.0, second_moment - mean * mean);
  r.fq = 4.0 * r.var_n1;
  r.dphi_bound = r.fq > 0.0 ? 1.0 / std::sqrt(r.fq) : std::numeric_limits<double>::infinity();
  return r;
}

QfiResult qfi(std::span<const double> state, const FockBasis& basis, const NaturalOrbitals& orbitals) {
  const Spdm rho = spdm(state, basis);
  const auto M = static_cast<Eigen::Index>(basis.mode_count());
  if (orbitals.orbitals.rows() != M || orbitals.orbitals.cols() < 1) {
    throw Error(ErrorCategory::inconsistent_orbitals, "qfi: orbital matrix does not match the basis modes");
  }
  const Eigen::VectorXd psi = orbitals.orbitals.col(0);
  const double mean = psi.dot(rho.matrix * psi);
  const double residual = (rho.matrix * psi - mean * psi).norm();
  if (residual > 1e-8 * std::max(1, rho.particles)) {
    throw Error(ErrorCategory::inconsistent_orbitals,
                fmt::format("qfi: orbital 0 is not an SPDM eigenvector of this state (residual {:.3e})", residual));
  }

  // <n1^2> = <b+ b+ b b> + <n1> with b = sum_k psi_k a_k; the first term is
  // the squared norm of b b |state>.
  const std::size_t Mm = basis.mode_count();
  SparseFockVector bb;
  std::vector<Occupation> occ(Mm);
  for (std::size_t j = 0; j < basis.size(); ++j) {
    const double cj = state[j];
    if (cj == 0.0) continue;
    const auto s = basis.state(j);
    std::copy(s.begin(), s.end(), occ.begin());
    for (std::size_t p = 0; p < Mm; ++p) {
      if (occ[p] == 0 || psi(static_cast<Eigen::Index>(p)) == 0.0) continue;
      const double first = std::sqrt(static_cast<double>(occ[p])) * psi(static_cast<Eigen::Index>(p));
      --occ[p];
      for (std::size_t q = 0; q < Mm; ++q) {
        if (occ[q] == 0 || psi(static_cast<Eigen::Index>(q)) == 0.0) continue;
        const double second = std::sqrt(static_cast<double>(occ[q])) * psi(static_cast<Eigen::Index>(q));
        --occ[q];
        bb.add(occ, cj * first * second);
        ++occ[q];
      }
      ++occ[p];
    }
  }
  return make_qfi_result(mean, bb.squared_norm() + mean);
}

QfiResult qfi_by_rotation(std::span<const double> state, const FockBasis& basis, const NaturalOrbitals& orbitals) {
  const RotatedState rotated = mode_rotate(state, basis, orbitals.orbitals);
  double mean = 0.0;
  double second = 0.0;
  for (std::size_t i = 0; i < rotated.space->size(); ++i) {
    const double p = rotated.amplitudes[i] * rotated.amplitudes[i];
    const double n1 = rotated.space->state(i)[0];
    mean += p * n1;
    second += p * n1 * n1;
  }
  return make_qfi_result(mean, second);
}

}  // namespace vortexed
