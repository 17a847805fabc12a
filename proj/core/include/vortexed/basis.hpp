#pragma once

#include <cstddef>
#include <cstdlib>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

namespace vortexed {

/// Single-particle orbital of the 2D isotropic oscillator, labeled by the
/// radial quantum number n and the angular momentum projection m.
struct SpMode {
  int n = 0;
  int m = 0;

  /// Landau index n + (|m| - m)/2.
  int landau_index() const noexcept { return n + (std::abs(m) - m) / 2; }

  /// Energy at zero rotation, in units of hbar*omega_perp.
  int energy() const noexcept { return 2 * n + std::abs(m) + 1; }

  friend bool operator==(const SpMode&, const SpMode&) = default;
};

struct BasisSpec {
  int particles = 0;
  int landau_levels = 1;
  int l_min = 0;
  int l_max = 0;
  std::size_t dimension_cap = 50'000'000;
};

/// Every mode with landau_index <= n_ll - 1 and m <= m_cap, ordered by
/// Landau index, then m, then n.
std::vector<SpMode> enumerate_modes(int n_ll, int m_cap);

/// Largest single-particle m that can appear in a state of the given spec.
/// Negative-m modes cost at least |m| Landau excitations, so one particle can
/// carry up to l_max + n_ll - 1.
int mode_m_cap(const BasisSpec& spec) noexcept;

using Occupation = std::uint8_t;

/// Half-open range of basis indices.
struct IndexRange {
  std::size_t begin = 0;
  std::size_t end = 0;

  std::size_t size() const noexcept { return end - begin; }
  bool empty() const noexcept { return begin == end; }
  bool contains(std::size_t i) const noexcept { return i >= begin && i < end; }
};

/// Open-addressing hash index from occupation vectors (stored elsewhere as a
/// flat array with fixed stride) to their position.
class OccupationIndex {
 public:
  OccupationIndex() = default;
  OccupationIndex(std::span<const Occupation> flat, std::size_t stride);

  std::optional<std::size_t> find(std::span<const Occupation> key) const noexcept;

  static std::uint64_t hash(std::span<const Occupation> key) noexcept;

 private:
  std::span<const Occupation> flat_;
  std::size_t stride_ = 0;
  std::size_t mask_ = 0;
  std::vector<std::uint32_t> slots_;  // 0 = empty, otherwise index + 1
};

/// Truncated bosonic Fock basis over a fixed mode list.
///
/// States are sorted by total angular momentum L ascending; within an L block
/// they are ordered lexicographically (ascending) by occupation vector in mode
/// order. Immutable after construction.
class FockBasis {
 public:
  explicit FockBasis(const BasisSpec& spec);

  FockBasis(const FockBasis&) = delete;
  FockBasis& operator=(const FockBasis&) = delete;
  FockBasis(FockBasis&&) = delete;
  FockBasis& operator=(FockBasis&&) = delete;

  const BasisSpec& spec() const noexcept { return spec_; }
  const std::vector<SpMode>& modes() const noexcept { return modes_; }
  std::size_t mode_count() const noexcept { return modes_.size(); }
  std::size_t size() const noexcept { return angular_momentum_.size(); }

  std::span<const Occupation> state(std::size_t i) const noexcept {
    return {occupations_.data() + i * modes_.size(), modes_.size()};
  }
  int angular_momentum(std::size_t i) const noexcept { return angular_momentum_[i]; }
  int landau_excitation(std::size_t i) const noexcept;

  std::optional<std::size_t> find(std::span<const Occupation> occupation) const noexcept {
    return index_.find(occupation);
  }

  /// Indices of the states with total angular momentum L. Throws
  /// out_of_window when L lies outside [l_min, l_max].
  IndexRange block_of(int L) const;

  /// Position of a mode in modes(), if present.
  std::optional<std::size_t> mode_index(const SpMode& mode) const noexcept;

  /// "L=<L> | (n,m)^count ..." for state i.
  std::string describe(std::size_t i) const;

 private:
  BasisSpec spec_;
  std::vector<SpMode> modes_;
  std::vector<Occupation> occupations_;
  std::vector<int> angular_momentum_;
  std::vector<IndexRange> blocks_;
  OccupationIndex index_;
};

/// Number of states build would produce, without materializing them.
/// Saturates at UINT64_MAX.
std::uint64_t count_states(const BasisSpec& spec);

}  // namespace vortexed
