#include "vortexed/matelems.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <mutex>
#include <numbers>
#include <tuple>

#include <Eigen/Eigenvalues>

#include "vortexed/error.hpp"

namespace vortexed {

namespace {

// sqrt(n! / (pi (n+|m|)!)), the normalization of R_{n,|m|}.
double radial_norm(const SpMode& mode) {
  double ratio = 1.0;
  const int am = std::abs(mode.m);
  for (int j = mode.n + 1; j <= mode.n + am; ++j) ratio /= j;
  return std::sqrt(ratio / std::numbers::pi);
}

// R_{n,|m|} with the e^{-t/2} factor and the t^{|m|/2} power stripped off,
// as a function of t = r^2.
double radial_polynomial(const SpMode& mode, double t) {
  return radial_norm(mode) *
         std::assoc_laguerre(static_cast<unsigned>(mode.n), static_cast<unsigned>(std::abs(mode.m)), t);
}

// Laguerre L_n(x) and L_{n-1}(x) by three-term recurrence.
std::pair<double, double> laguerre_pair(int n, double x) {
  double prev = 1.0;
  double cur = 1.0 - x;
  if (n == 0) return {1.0, 0.0};
  for (int k = 1; k < n; ++k) {
    const double next = ((2.0 * k + 1.0 - x) * cur - k * prev) / (k + 1.0);
    prev = cur;
    cur = next;
  }
  return {cur, prev};
}

GaussLaguerreRule compute_rule(int order) {
  // Golub-Welsch start, then Newton polish on L_n.
  Eigen::MatrixXd jacobi = Eigen::MatrixXd::Zero(order, order);
  for (int i = 0; i < order; ++i) {
    jacobi(i, i) = 2.0 * i + 1.0;
    if (i + 1 < order) {
      jacobi(i, i + 1) = i + 1.0;
      jacobi(i + 1, i) = i + 1.0;
    }
  }
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(jacobi, Eigen::EigenvaluesOnly);
  GaussLaguerreRule rule;
  rule.nodes.resize(static_cast<std::size_t>(order));
  rule.weights.resize(static_cast<std::size_t>(order));
  for (int i = 0; i < order; ++i) {
    double x = solver.eigenvalues()(i);
    for (int it = 0; it < 8; ++it) {
      const auto [ln, lnm1] = laguerre_pair(order, x);
      const double derivative = order * (ln - lnm1) / x;
      const double step = ln / derivative;
      x -= step;
      if (std::abs(step) <= 1e-16 * std::abs(x)) break;
    }
    const auto [ln1, ln] = laguerre_pair(order + 1, x);
    (void)ln;
    rule.nodes[static_cast<std::size_t>(i)] = x;
    rule.weights[static_cast<std::size_t>(i)] = x / ((order + 1.0) * (order + 1.0) * ln1 * ln1);
  }
  return rule;
}

bool conserves_m(const SpMode& k, const SpMode& l, const SpMode& p, const SpMode& q) {
  return k.m + l.m == p.m + q.m;
}

int interaction_degree(const SpMode& k, const SpMode& l, const SpMode& p, const SpMode& q) {
  return (std::abs(k.m) + std::abs(l.m) + std::abs(p.m) + std::abs(q.m)) / 2 + k.n + l.n + p.n + q.n;
}

int anisotropy_degree(const SpMode& k, const SpMode& p) {
  return (std::abs(k.m) + std::abs(p.m)) / 2 + k.n + p.n + 1;
}

}  // namespace

double radial_wavefunction(const SpMode& mode, double r) {
  const double t = r * r;
  return radial_polynomial(mode, t) * std::pow(r, std::abs(mode.m)) * std::exp(-0.5 * t);
}

const GaussLaguerreRule& gauss_laguerre(int order) {
  if (order < 1) {
    throw Error(ErrorCategory::invalid_argument, "gauss_laguerre: order must be >= 1");
  }
  static std::mutex mutex;
  static std::map<int, GaussLaguerreRule> cache;
  std::lock_guard lock(mutex);
  auto it = cache.find(order);
  if (it == cache.end()) it = cache.emplace(order, compute_rule(order)).first;
  return it->second;
}

double interaction_element(const SpMode& k, const SpMode& l, const SpMode& p, const SpMode& q,
                           int order) {
  if (!conserves_m(k, l, p, q)) return 0.0;
  // With t = r^2 the radial integrand is poly(t) e^{-2t}; substitute s = 2t.
  const int power = (std::abs(k.m) + std::abs(l.m) + std::abs(p.m) + std::abs(q.m)) / 2;
  const auto& rule = gauss_laguerre(order);
  double sum = 0.0;
  for (std::size_t i = 0; i < rule.nodes.size(); ++i) {
    const double t = 0.5 * rule.nodes[i];
    sum += rule.weights[i] * std::pow(t, power) * radial_polynomial(k, t) * radial_polynomial(l, t) *
           radial_polynomial(p, t) * radial_polynomial(q, t);
  }
  return 0.5 * std::numbers::pi * sum;
}

double interaction_element(const SpMode& k, const SpMode& l, const SpMode& p, const SpMode& q) {
  return interaction_element(k, l, p, q, interaction_degree(k, l, p, q) / 2 + 2);
}

double anisotropy_element(const SpMode& k, const SpMode& p, int order) {
  if (std::abs(p.m - k.m) != 2) return 0.0;
  // r^2 cos(2 theta): angular integral gives pi, r^3 dr = t dt / 2.
  const int power = (std::abs(k.m) + std::abs(p.m)) / 2 + 1;
  const auto& rule = gauss_laguerre(order);
  double sum = 0.0;
  for (std::size_t i = 0; i < rule.nodes.size(); ++i) {
    const double t = rule.nodes[i];
    sum += rule.weights[i] * std::pow(t, power) * radial_polynomial(k, t) * radial_polynomial(p, t);
  }
  return 0.5 * std::numbers::pi * sum;
}

double anisotropy_element(const SpMode& k, const SpMode& p) {
  return anisotropy_element(k, p, anisotropy_degree(k, p) / 2 + 2);
}

// ---------------------------------------------------------------------------

InteractionTable::InteractionTable(std::span<const SpMode> modes) : mode_count_(modes.size()) {
  const std::size_t M = modes.size();
  // Unordered pairs grouped by total m.
  std::map<int, std::vector<std::pair<std::uint32_t, std::uint32_t>>> pairs_by_m;
  for (std::uint32_t a = 0; a < M; ++a) {
    for (std::uint32_t b = a; b < M; ++b) pairs_by_m[modes[a].m + modes[b].m].emplace_back(a, b);
  }
  for (const auto& [total_m, pairs] : pairs_by_m) {
    for (std::size_t i = 0; i < pairs.size(); ++i) {
      for (std::size_t j = i; j < pairs.size(); ++j) {
        const auto [k, l] = pairs[i];
        const auto [p, q] = pairs[j];
        const double v = interaction_element(modes[k], modes[l], modes[p], modes[q]);
        if (std::abs(v) < kZeroThreshold) continue;
        entries_.push_back({k, l, p, q, v});
      }
    }
  }
  std::sort(entries_.begin(), entries_.end(), [](const Entry& x, const Entry& y) {
    return std::tie(x.k, x.l, x.p, x.q) < std::tie(y.k, y.l, y.p, y.q);
  });

  std::vector<std::vector<Transition>> by_pair(M * M);
  for (const Entry& e : entries_) {
    by_pair[pair_id(e.p, e.q)].push_back({e.k, e.l, e.value});
    if (e.k != e.p || e.l != e.q) by_pair[pair_id(e.k, e.l)].push_back({e.p, e.q, e.value});
  }
  pair_offsets_.assign(M * M + 1, 0);
  for (std::size_t id = 0; id < M * M; ++id) {
    auto& list = by_pair[id];
    std::sort(list.begin(), list.end(),
              [](const Transition& x, const Transition& y) { return std::tie(x.k, x.l) < std::tie(y.k, y.l); });
    pair_offsets_[id + 1] = pair_offsets_[id] + list.size();
    transitions_.insert(transitions_.end(), list.begin(), list.end());
  }
}

std::size_t InteractionTable::pair_id(std::size_t a, std::size_t b) const noexcept {
  if (a > b) std::swap(a, b);
  return a * mode_count_ + b;
}

std::span<const InteractionTable::Transition> InteractionTable::from_pair(std::size_t p,
                                                                          std::size_t q) const noexcept {
  if (p >= mode_count_ || q >= mode_count_) return {};
  const std::size_t id = pair_id(p, q);
  return {transitions_.data() + pair_offsets_[id], pair_offsets_[id + 1] - pair_offsets_[id]};
}

double InteractionTable::value(std::size_t k, std::size_t l, std::size_t p, std::size_t q) const noexcept {
  if (k > l) std::swap(k, l);
  for (const Transition& t : from_pair(p, q)) {
    if (t.k == k && t.l == l) return t.value;
  }
  return 0.0;
}

AnisotropyTable::AnisotropyTable(std::span<const SpMode> modes) : mode_count_(modes.size()) {
  const std::size_t M = modes.size();
  offsets_.assign(M + 1, 0);
  for (std::uint32_t from = 0; from < M; ++from) {
    for (std::uint32_t to = 0; to < M; ++to) {
      if (std::abs(modes[to].m - modes[from].m) != 2) continue;
      // Evaluate on the ordered pair (min, max) so both directions are bitwise equal.
      const double v = from < to ? anisotropy_element(modes[from], modes[to])
                                 : anisotropy_element(modes[to], modes[from]);
      if (std::abs(v) < kZeroThreshold) continue;
      entries_.push_back({from, to, v});
    }
    offsets_[from + 1] = entries_.size();
  }
}

double AnisotropyTable::value(std::size_t from, std::size_t to) const noexcept {
  for (const Entry& e : from_mode(from)) {
    if (e.to == to) return e.value;
  }
  return 0.0;
}

std::span<const AnisotropyTable::Entry> AnisotropyTable::from_mode(std::size_t from) const noexcept {
  if (from >= mode_count_) return {};
  return {entries_.data() + offsets_[from], offsets_[from + 1] - offsets_[from]};
}

MatrixElementTables build_tables(std::span<const SpMode> modes) {
  return {InteractionTable(modes), AnisotropyTable(modes)};
}

}  // namespace vortexed
