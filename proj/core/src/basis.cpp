#include "vortexed/basis.hpp"

#include <algorithm>
#include <bit>
#include <limits>

#include <fmt/format.h>

#include "vortexed/error.hpp"

namespace vortexed {

std::vector<SpMode> enumerate_modes(int n_ll, int m_cap) {
  if (n_ll < 1) {
    throw Error(ErrorCategory::invalid_argument,
                fmt::format("enumerate_modes: n_ll must be >= 1, got {}", n_ll));
  }
  if (m_cap < 0) {
    throw Error(ErrorCategory::invalid_argument,
                fmt::format("enumerate_modes: m_cap must be >= 0, got {}", m_cap));
  }
  // For fixed (ll, m) the radial number is n = ll - (|m| - m)/2, so each
  // (ll, m) pair names at most one mode.
  std::vector<SpMode> modes;
  for (int ll = 0; ll < n_ll; ++ll) {
    for (int m = -ll; m <= m_cap; ++m) {
      const int n = ll - (std::abs(m) - m) / 2;
      if (n >= 0) modes.push_back({n, m});
    }
  }
  return modes;
}

int mode_m_cap(const BasisSpec& spec) noexcept {
  return std::max(0, spec.l_max + spec.landau_levels - 1);
}

namespace {

std::uint64_t saturating_add(std::uint64_t a, std::uint64_t b) noexcept {
  const std::uint64_t s = a + b;
  return s < a ? std::numeric_limits<std::uint64_t>::max() : s;
}

void validate(const BasisSpec& spec) {
  if (spec.particles < 1 || spec.particles > std::numeric_limits<Occupation>::max()) {
    throw Error(ErrorCategory::invalid_argument,
                fmt::format("basis: particle count {} out of range [1, 255]", spec.particles));
  }
  if (spec.landau_levels < 1) {
    throw Error(ErrorCategory::invalid_argument,
                fmt::format("basis: n_ll must be >= 1, got {}", spec.landau_levels));
  }
  if (spec.l_min > spec.l_max) {
    throw Error(ErrorCategory::invalid_argument,
                fmt::format("basis: l_min {} exceeds l_max {}", spec.l_min, spec.l_max));
  }
}

// Counts completions of a partially filled occupation vector. Memoized over
// (mode position, remaining particles, accumulated L, used Landau excitation).
class CompletionCounter {
 public:
  CompletionCounter(const BasisSpec& spec, const std::vector<SpMode>& modes)
      : spec_(spec),
        modes_(modes),
        l_lo_(-(spec.landau_levels - 1)),
        l_hi_(spec.l_max + spec.landau_levels - 1),
        memo_((modes.size() + 1) * static_cast<std::size_t>(spec.particles + 1) *
                  static_cast<std::size_t>(l_hi_ - l_lo_ + 1) *
                  static_cast<std::size_t>(spec.landau_levels),
              kUnknown) {}

  std::uint64_t count(std::size_t pos, int remaining, int L, int excitation) {
    // Remaining modes can lower L by at most the unused excitation budget.
    const int budget = spec_.landau_levels - 1 - excitation;
    if (L - budget > spec_.l_max) return 0;
    if (L < l_lo_) return 0;
    if (pos == modes_.size()) {
      return (remaining == 0 && L >= spec_.l_min && L <= spec_.l_max) ? 1 : 0;
    }
    std::uint64_t& slot = memo_[key(pos, remaining, L, excitation)];
    if (slot != kUnknown) return slot;

    const SpMode& mode = modes_[pos];
    const int ll = mode.landau_index();
    std::uint64_t total = 0;
    for (int c = 0; c <= remaining; ++c) {
      if (excitation + c * ll > spec_.landau_levels - 1) break;
      total = saturating_add(total, count(pos + 1, remaining - c, L + c * mode.m, excitation + c * ll));
    }
    slot = total;
    return total;
  }

 private:
  static constexpr std::uint64_t kUnknown = std::numeric_limits<std::uint64_t>::max() - 1;

  std::size_t key(std::size_t pos, int remaining, int L, int excitation) const noexcept {
    const auto n_rem = static_cast<std::size_t>(spec_.particles + 1);
    const auto n_l = static_cast<std::size_t>(l_hi_ - l_lo_ + 1);
    const auto n_e = static_cast<std::size_t>(spec_.landau_levels);
    return ((pos * n_rem + static_cast<std::size_t>(remaining)) * n_l +
            static_cast<std::size_t>(L - l_lo_)) * n_e + static_cast<std::size_t>(excitation);
  }

  const BasisSpec& spec_;
  const std::vector<SpMode>& modes_;
  int l_lo_;
  int l_hi_;
  std::vector<std::uint64_t> memo_;
};

}  // namespace

std::uint64_t count_states(const BasisSpec& spec) {
  validate(spec);
  const auto modes = enumerate_modes(spec.landau_levels, mode_m_cap(spec));
  CompletionCounter counter(spec, modes);
  return counter.count(0, spec.particles, 0, 0);
}

// ---------------------------------------------------------------------------

std::uint64_t OccupationIndex::hash(std::span<const Occupation> key) noexcept {
  std::uint64_t h = 1469598103934665603ULL;
  for (Occupation c : key) {
    h ^= c;
    h *= 1099511628211ULL;
  }
  h ^= h >> 29;
  h *= 0xbf58476d1ce4e5b9ULL;
  h ^= h >> 32;
  return h;
}

OccupationIndex::OccupationIndex(std::span<const Occupation> flat, std::size_t stride)
    : flat_(flat), stride_(stride) {
  const std::size_t count = stride == 0 ? 0 : flat.size() / stride;
  const std::size_t capacity = std::bit_ceil(std::max<std::size_t>(16, 2 * count));
  mask_ = capacity - 1;
  slots_.assign(capacity, 0);
  for (std::size_t i = 0; i < count; ++i) {
    std::size_t slot = hash(flat.subspan(i * stride, stride)) & mask_;
    while (slots_[slot] != 0) slot = (slot + 1) & mask_;
    slots_[slot] = static_cast<std::uint32_t>(i + 1);
  }
}

std::optional<std::size_t> OccupationIndex::find(std::span<const Occupation> key) const noexcept {
  if (slots_.empty() || key.size() != stride_) return std::nullopt;
  std::size_t slot = hash(key) & mask_;
  while (slots_[slot] != 0) {
    const std::size_t i = slots_[slot] - 1;
    if (std::equal(key.begin(), key.end(), flat_.begin() + static_cast<std::ptrdiff_t>(i * stride_))) {
      return i;
    }
    slot = (slot + 1) & mask_;
  }
  return std::nullopt;
}

// ---------------------------------------------------------------------------

FockBasis::FockBasis(const BasisSpec& spec) : spec_(spec) {
  validate(spec);
  modes_ = enumerate_modes(spec.landau_levels, mode_m_cap(spec));
  const std::size_t n_modes = modes_.size();

  CompletionCounter counter(spec, modes_);
  const std::uint64_t total = counter.count(0, spec.particles, 0, 0);
  const std::uint64_t cap = std::min<std::uint64_t>(spec.dimension_cap,
                                                    std::numeric_limits<std::uint32_t>::max() - 1);
  if (total > cap) {
    throw Error(ErrorCategory::dimension_cap_exceeded,
                fmt::format("basis dimension {} exceeds cap {}", total, cap));
  }
  if (total == 0) {
    throw Error(ErrorCategory::empty_basis,
                fmt::format("no Fock state with N={} n_ll={} L in [{}, {}]", spec.particles,
                            spec.landau_levels, spec.l_min, spec.l_max));
  }

  // Depth-first fill with occupation of each mode ascending, pruned by the
  // completion count, yields states in ascending lexicographic order.
  std::vector<Occupation> dfs_states;
  dfs_states.reserve(total * n_modes);
  std::vector<int> dfs_l;
  dfs_l.reserve(total);
  std::vector<Occupation> current(n_modes, 0);

  auto fill = [&](auto&& self, std::size_t pos, int remaining, int L, int excitation) -> void {
    if (pos == n_modes) {
      dfs_states.insert(dfs_states.end(), current.begin(), current.end());
      dfs_l.push_back(L);
      return;
    }
    const SpMode& mode = modes_[pos];
    const int ll = mode.landau_index();
    for (int c = 0; c <= remaining; ++c) {
      if (excitation + c * ll > spec_.landau_levels - 1) break;
      const int next_l = L + c * mode.m;
      const int next_e = excitation + c * ll;
      if (counter.count(pos + 1, remaining - c, next_l, next_e) == 0) continue;
      current[pos] = static_cast<Occupation>(c);
      self(self, pos + 1, remaining - c, next_l, next_e);
    }
    current[pos] = 0;
  };
  fill(fill, 0, spec.particles, 0, 0);

  // Stable counting sort by L keeps the lexicographic order inside blocks.
  const auto n_blocks = static_cast<std::size_t>(spec.l_max - spec.l_min + 1);
  std::vector<std::size_t> block_sizes(n_blocks, 0);
  for (int L : dfs_l) ++block_sizes[static_cast<std::size_t>(L - spec.l_min)];
  blocks_.resize(n_blocks);
  std::size_t offset = 0;
  for (std::size_t b = 0; b < n_blocks; ++b) {
    blocks_[b] = {offset, offset + block_sizes[b]};
    offset += block_sizes[b];
  }

  occupations_.resize(dfs_states.size());
  angular_momentum_.resize(dfs_l.size());
  std::vector<std::size_t> cursor(n_blocks);
  for (std::size_t b = 0; b < n_blocks; ++b) cursor[b] = blocks_[b].begin;
  for (std::size_t s = 0; s < dfs_l.size(); ++s) {
    const auto b = static_cast<std::size_t>(dfs_l[s] - spec.l_min);
    const std::size_t dst = cursor[b]++;
    std::copy_n(dfs_states.begin() + static_cast<std::ptrdiff_t>(s * n_modes), n_modes,
                occupations_.begin() + static_cast<std::ptrdiff_t>(dst * n_modes));
    angular_momentum_[dst] = dfs_l[s];
  }

  index_ = OccupationIndex(occupations_, n_modes);
}

int FockBasis::landau_excitation(std::size_t i) const noexcept {
  const auto occ = state(i);
  int total = 0;
  for (std::size_t k = 0; k < modes_.size(); ++k) total += occ[k] * modes_[k].landau_index();
  return total;
}

IndexRange FockBasis::block_of(int L) const {
  if (L < spec_.l_min || L > spec_.l_max) {
    throw Error(ErrorCategory::out_of_window,
                fmt::format("L={} outside basis window [{}, {}]", L, spec_.l_min, spec_.l_max));
  }
  return blocks_[static_cast<std::size_t>(L - spec_.l_min)];
}

std::optional<std::size_t> FockBasis::mode_index(const SpMode& mode) const noexcept {
  const auto it = std::find(modes_.begin(), modes_.end(), mode);
  if (it == modes_.end()) return std::nullopt;
  return static_cast<std::size_t>(it - modes_.begin());
}

std::string FockBasis::describe(std::size_t i) const {
  std::string out = fmt::format("L={} |", angular_momentum_[i]);
  const auto occ = state(i);
  for (std::size_t k = 0; k < modes_.size(); ++k) {
    if (occ[k] == 0) continue;
    out += fmt::format(" ({},{})^{}", modes_[k].n, modes_[k].m, static_cast<int>(occ[k]));
  }
  return out;
}

}  // namespace vortexed
