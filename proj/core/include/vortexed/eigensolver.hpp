#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include <Eigen/Dense>

#include "vortexed/hamiltonian.hpp"

namespace vortexed {

struct EigenResult {
  std::vector<double> eigenvalues;  // ascending
  Eigen::MatrixXd eigenvectors;     // one column per eigenvalue
  std::vector<double> residual_norms;
  std::vector<bool> converged;
  int iterations = 0;  // matvecs for Krylov runs, 0 for dense solves
  int restarts = 0;

  bool all_converged() const noexcept;
  std::span<const double> vector(std::size_t i) const noexcept {
    return {eigenvectors.col(static_cast<Eigen::Index>(i)).data(),
            static_cast<std::size_t>(eigenvectors.rows())};
  }
};

struct LanczosOptions {
  int count = 4;
  double tol = 1e-10;
  std::uint64_t seed = 1;
  int krylov_dim = 0;  // 0 picks max(2*count + 40, 60)
  int max_restarts = 500;
  /// Problems up to this dimension are solved densely.
  std::size_t dense_fallback = 400;
};

/// Lowest eigenpairs of H(couplings) by thick-restart Lanczos with full
/// reorthogonalization. Deterministic for a fixed seed and warm start. If a
/// warm start is given it seeds the Krylov space, mixed with a small random
/// component so every symmetry sector is reachable. Unconverged pairs are
/// flagged, not thrown.
EigenResult lowest_eigenpairs(const HamiltonianParts& parts, const Couplings& couplings,
                              const LanczosOptions& options, std::span<const double> warm_start = {});

/// Every eigenvalue of H by dense symmetric solve. Throws dimension_too_large
/// above dense_cap.
std::vector<double> dense_spectrum(const HamiltonianParts& parts, const Couplings& couplings,
                                   std::size_t dense_cap = 4000);

/// Lowest `count` eigenpairs by dense solve.
EigenResult dense_eigenpairs(const HamiltonianParts& parts, const Couplings& couplings, int count,
                             std::size_t dense_cap = 4000);

}  // namespace vortexed
