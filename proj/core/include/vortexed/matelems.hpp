#pragma once

#include <array>
#include <cstdint>
#include <span>
#include <vector>

#include "vortexed/basis.hpp"

namespace vortexed {

// Dimensionless trap units throughout: energies in hbar*omega_perp, lengths in
// sqrt(hbar / (M omega_perp)).

/// R_{n,|m|}(r) with the full 2D orbital R(r) e^{i m theta} normalized to one.
double radial_wavefunction(const SpMode& mode, double r);

/// Nodes and weights of n-point Gauss-Laguerre quadrature for weight e^{-x}.
struct GaussLaguerreRule {
  std::vector<double> nodes;
  std::vector<double> weights;
};

/// Cached per order; exact for polynomials of degree <= 2*order - 1.
const GaussLaguerreRule& gauss_laguerre(int order);

/// Integral of conj(phi_k) conj(phi_l) phi_p phi_q over the plane.
double interaction_element(const SpMode& k, const SpMode& l, const SpMode& p, const SpMode& q);

/// <p| x^2 - y^2 |k>. Nonzero only for m_p = m_k +/- 2.
double anisotropy_element(const SpMode& k, const SpMode& p);

/// Same integrals evaluated with an explicit quadrature order, for exactness
/// checks. The default functions use degree/2 + 2.
double interaction_element(const SpMode& k, const SpMode& l, const SpMode& p, const SpMode& q,
                           int order);
double anisotropy_element(const SpMode& k, const SpMode& p, int order);

inline constexpr double kZeroThreshold = 1e-14;

/// Contact interaction coefficients over a mode list. Only canonical
/// quadruples (k <= l, p <= q, (k,l) <= (p,q)) are stored; lookups fold any
/// ordering onto its representative.
class InteractionTable {
 public:
  struct Entry {
    std::uint32_t k, l, p, q;
    double value;
  };

  /// Coefficients grouped by annihilated pair: for pair (p <= q), every
  /// created pair (k <= l) with its coefficient.
  struct Transition {
    std::uint32_t k, l;
    double value;
  };

  InteractionTable() = default;
  explicit InteractionTable(std::span<const SpMode> modes);

  std::size_t mode_count() const noexcept { return mode_count_; }
  const std::vector<Entry>& entries() const noexcept { return entries_; }

  /// Coefficient for any index ordering; 0 if not stored.
  double value(std::size_t k, std::size_t l, std::size_t p, std::size_t q) const noexcept;

  std::span<const Transition> from_pair(std::size_t p, std::size_t q) const noexcept;

 private:
  std::size_t pair_id(std::size_t a, std::size_t b) const noexcept;

  std::size_t mode_count_ = 0;
  std::vector<Entry> entries_;
  std::vector<std::size_t> pair_offsets_;
  std::vector<Transition> transitions_;
};

/// Bare (x^2 - y^2) coefficients between modes, stored for every ordered pair.
class AnisotropyTable {
 public:
  struct Entry {
    std::uint32_t from, to;
    double value;
  };

  AnisotropyTable() = default;
  explicit AnisotropyTable(std::span<const SpMode> modes);

  std::size_t mode_count() const noexcept { return mode_count_; }
  const std::vector<Entry>& entries() const noexcept { return entries_; }
  double value(std::size_t from, std::size_t to) const noexcept;

  /// Entries leaving mode `from`.
  std::span<const Entry> from_mode(std::size_t from) const noexcept;

 private:
  std::size_t mode_count_ = 0;
  std::vector<Entry> entries_;
  std::vector<std::size_t> offsets_;
};

struct MatrixElementTables {
  InteractionTable interaction;
  AnisotropyTable anisotropy;
};

MatrixElementTables build_tables(std::span<const SpMode> modes);

}  // namespace vortexed
