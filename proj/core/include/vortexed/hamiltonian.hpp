#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include <Eigen/Dense>

#include "vortexed/basis.hpp"
#include "vortexed/matelems.hpp"

namespace vortexed {

/// Real symmetric matrix in compressed sparse row layout.
struct CsrMatrix {
  std::size_t rows = 0;
  std::vector<std::size_t> row_ptr{0};
  std::vector<std::uint32_t> cols;
  std::vector<double> values;

  std::size_t nnz() const noexcept { return values.size(); }
  double at(std::size_t i, std::size_t j) const noexcept;
};

/// Point in parameter space: rotation rate, coupling g and anisotropy A.
struct Couplings {
  double omega = 0.0;
  double g = 0.0;
  double anisotropy = 0.0;
};

/// Prefactor multiplying A in front of the bare (x^2 - y^2) matrix.
///
/// The rotating-frame Hamiltonian is usually written with 2A M omega^2
/// (x^2 - y^2). The published critical frequencies for this model are
/// reproduced with a unit prefactor (A M omega^2 (x^2 - y^2)), which is the
/// convention used here; see README "Anisotropy convention".
inline constexpr double kAnisotropyPrefactor = 1.0;

/// Omega-independent pieces of the many-body Hamiltonian
///   H = diag(h0) - Omega diag(lz) + g V + kAnisotropyPrefactor * A * W.
struct HamiltonianParts {
  std::vector<double> h0_diag;
  std::vector<double> lz_diag;
  CsrMatrix interaction;  // V, coefficient of g
  CsrMatrix anisotropy;   // W, coefficient of kAnisotropyPrefactor * A

  std::size_t dimension() const noexcept { return h0_diag.size(); }
};

/// Builds the four pieces in the given Fock basis. The contact interaction is
/// (g/2) sum_{klpq} I(k,l,p,q) a+_k a+_l a_q a_p, so a pair in one mode feels
/// the interaction once.
HamiltonianParts assemble(const FockBasis& basis, const MatrixElementTables& tables);

/// y = H(couplings) x without forming H.
void matvec(const HamiltonianParts& parts, const Couplings& couplings, std::span<const double> x,
            std::span<double> y);

std::vector<double> matvec(const HamiltonianParts& parts, const Couplings& couplings,
                           std::span<const double> x);

Eigen::MatrixXd to_dense(const HamiltonianParts& parts, const Couplings& couplings);

/// Principal sub-block [range.begin, range.end) of the pieces. Anisotropy
/// entries leaving the range are dropped.
HamiltonianParts restrict_to(const HamiltonianParts& parts, IndexRange range);

}  // namespace vortexed
