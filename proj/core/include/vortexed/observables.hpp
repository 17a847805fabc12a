#pragma once

#include <memory>
#include <optional>
#include <span>
#include <vector>

#include <Eigen/Dense>

#include "vortexed/basis.hpp"

namespace vortexed {

/// Single-particle density matrix rho(k,l) = <a+_k a_l>, real symmetric over
/// the basis modes.
struct Spdm {
  Eigen::MatrixXd matrix;
  int particles = 0;

  double trace() const { return matrix.trace(); }
};

/// Throws unnormalized_state if |<psi|psi> - 1| > 1e-10.
Spdm spdm(std::span<const double> state, const FockBasis& basis);

enum class Parity { even, odd, mixed };

/// Eigen-decomposition of an SPDM.
///
/// Occupations are sorted descending. When the matrix has no couplings between
/// even-m and odd-m modes the two sectors are diagonalized separately, so each
/// orbital has definite parity; occupations equal within `tie_tolerance` put
/// the even orbital first. Each orbital's largest-magnitude coefficient is
/// positive.
struct NaturalOrbitals {
  std::vector<double> occupations;
  Eigen::MatrixXd orbitals;  // column i is orbital i over the basis modes
  std::vector<Parity> parity;

  /// Most populated orbital of each parity, if any orbital has that parity.
  std::optional<std::size_t> leading(Parity p) const noexcept;
  std::span<const double> orbital(std::size_t i) const noexcept {
    return {orbitals.col(static_cast<Eigen::Index>(i)).data(), static_cast<std::size_t>(orbitals.rows())};
  }
};

NaturalOrbitals natural_orbitals(const Spdm& rho, std::span<const SpMode> modes, double tie_tolerance = 1e-9);

/// All N-boson occupation vectors over M modes, in ascending lexicographic
/// order, with a hash index.
class FullFockSpace {
 public:
  FullFockSpace(int particles, std::size_t modes, std::size_t dimension_cap = 20'000'000);

  FullFockSpace(const FullFockSpace&) = delete;
  FullFockSpace& operator=(const FullFockSpace&) = delete;

  int particles() const noexcept { return particles_; }
  std::size_t mode_count() const noexcept { return modes_; }
  std::size_t size() const noexcept { return occupations_.size() / modes_; }
  std::span<const Occupation> state(std::size_t i) const noexcept {
    return {occupations_.data() + i * modes_, modes_};
  }
  std::optional<std::size_t> find(std::span<const Occupation> occupation) const noexcept {
    return index_.find(occupation);
  }

 private:
  int particles_;
  std::size_t modes_;
  std::vector<Occupation> occupations_;
  OccupationIndex index_;
};

struct RotatedState {
  std::shared_ptr<const FullFockSpace> space;
  std::vector<double> amplitudes;
};

/// Re-expresses a many-body state in the single-particle basis whose orbitals
/// are the columns of `u` (modes x r, orthonormal columns, r <= modes). The
/// columns are completed to a square orthogonal matrix, which is decomposed
/// into Givens plane rotations; each rotation acts exactly on the two-mode
/// Fock subspaces it leaves invariant. Mode i of the output is column i of the
/// completed matrix. Throws leakage if the result norm drifts from 1 by more
/// than 1e-8.
RotatedState mode_rotate(std::span<const double> state, const FockBasis& basis, const Eigen::MatrixXd& u);

/// Same rotation applied to a vector that already lives in a full Fock space.
RotatedState mode_rotate(const RotatedState& state, const Eigen::MatrixXd& u);

/// Embeds a truncated-basis state into the full N-boson space over its modes.
RotatedState embed(std::span<const double> state, const FockBasis& basis);

struct TwoModeDecomposition {
  std::vector<double> coefficients;   // C_n, n = 0..N/2
  std::vector<double> probabilities;  // P_n = C_n^2
  double fidelity = 0.0;              // sum P_n
  double odd_weight = 0.0;            // weight with an odd count in the second orbital
};

/// Projection of the state onto |N-2n in orbital 0, 2n in orbital 1> of the
/// given natural orbitals. Throws odd_particle_number for odd N.
TwoModeDecomposition two_mode_decompose(std::span<const double> state, const FockBasis& basis,
                                        const NaturalOrbitals& orbitals);

/// Amplitudes <N-j in psi1, j in psi2 | state> for j = 0..N, by expanding each
/// Fock state over the two orbitals.
std::vector<double> two_orbital_amplitudes(std::span<const double> state, const FockBasis& basis,
                                           std::span<const double> psi1, std::span<const double> psi2);

struct QfiResult {
  double fq = 0.0;
  double mean_n1 = 0.0;
  double var_n1 = 0.0;
  double dphi_bound = 0.0;  // 1/sqrt(fq), +inf when fq = 0
};

/// Quantum Fisher information for a phase imprinted on natural orbital 0:
/// F_Q = 4 Var(n1). Uses the one-body and contracted two-body correlators of
/// the full state. Throws inconsistent_orbitals when orbital 0 is not an SPDM
/// eigenvector of this state.
QfiResult qfi(std::span<const double> state, const FockBasis& basis, const NaturalOrbitals& orbitals);

/// Same quantity from the variance of the occupation of mode 0 after
/// mode_rotate into the natural orbitals. Only affordable for small N.
QfiResult qfi_by_rotation(std::span<const double> state, const FockBasis& basis,
                          const NaturalOrbitals& orbitals);

QfiResult make_qfi_result(double mean, double second_moment);

}  // namespace vortexed
