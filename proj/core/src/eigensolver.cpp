#include "vortexed/eigensolver.hpp"

#include <algorithm>
#include <cmath>
#include <random>

#include <fmt/format.h>

#include "vortexed/error.hpp"

namespace vortexed {

bool EigenResult::all_converged() const noexcept {
  return std::all_of(converged.begin(), converged.end(), [](bool c) { return c; });
}

namespace {

// Largest-magnitude component positive.
void fix_sign(Eigen::Ref<Eigen::VectorXd> v) {
  Eigen::Index arg = 0;
  v.cwiseAbs().maxCoeff(&arg);
  if (v(arg) < 0) v = -v;
}

Eigen::VectorXd random_vector(Eigen::Index n, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> dist(-1.0, 1.0);
  Eigen::VectorXd v(n);
  for (Eigen::Index i = 0; i < n; ++i) v(i) = dist(rng);
  return v;
}

void finalize_residuals(const HamiltonianParts& parts, const Couplings& couplings, double tol,
                        EigenResult& result) {
  const auto k = static_cast<std::size_t>(result.eigenvectors.cols());
  result.residual_norms.resize(k);
  result.converged.resize(k);
  Eigen::VectorXd hv(result.eigenvectors.rows());
  for (std::size_t i = 0; i < k; ++i) {
    const auto col = static_cast<Eigen::Index>(i);
    matvec(parts, couplings, result.vector(i), {hv.data(), static_cast<std::size_t>(hv.size())});
    const double r = (hv - result.eigenvalues[i] * result.eigenvectors.col(col)).norm();
    result.residual_norms[i] = r;
    result.converged[i] = r <= tol;
  }
}

bool is_diagonal(const Eigen::MatrixXd& H) {
  for (Eigen::Index j = 0; j < H.cols(); ++j)
    for (Eigen::Index i = 0; i < H.rows(); ++i)
      if (i != j && H(i, j) != 0.0) return false;
  return true;
}

// A diagonal H is solved by sorting, which keeps its eigenvalues bit-exact.
struct DenseSolution {
  Eigen::VectorXd values;
  Eigen::MatrixXd vectors;
};

DenseSolution solve_dense(const Eigen::MatrixXd& H, bool with_vectors) {
  const Eigen::Index n = H.rows();
  if (is_diagonal(H)) {
    std::vector<Eigen::Index> order(static_cast<std::size_t>(n));
    for (Eigen::Index i = 0; i < n; ++i) order[static_cast<std::size_t>(i)] = i;
    std::stable_sort(order.begin(), order.end(), [&](auto a, auto b) { return H(a, a) < H(b, b); });
    DenseSolution s{Eigen::VectorXd(n), {}};
    if (with_vectors) s.vectors = Eigen::MatrixXd::Zero(n, n);
    for (Eigen::Index i = 0; i < n; ++i) {
      const auto src = order[static_cast<std::size_t>(i)];
      s.values(i) = H(src, src);
      if (with_vectors) s.vectors(src, i) = 1.0;
    }
    return s;
  }
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(H, with_vectors ? Eigen::ComputeEigenvectors
                                                                         : Eigen::EigenvaluesOnly);
  return {solver.eigenvalues(), with_vectors ? solver.eigenvectors() : Eigen::MatrixXd()};
}

}  // namespace

EigenResult dense_eigenpairs(const HamiltonianParts& parts, const Couplings& couplings, int count,
                             std::size_t dense_cap) {
  const std::size_t n = parts.dimension();
  if (n > dense_cap) {
    throw Error(ErrorCategory::dimension_too_large,
                fmt::format("dense solve of dimension {} exceeds cap {}", n, dense_cap));
  }
  const DenseSolution solution = solve_dense(to_dense(parts, couplings), true);
  const auto k = std::min<Eigen::Index>(count, static_cast<Eigen::Index>(n));
  EigenResult result;
  result.eigenvalues.assign(solution.values.data(), solution.values.data() + k);
  result.eigenvectors = solution.vectors.leftCols(k);
  for (Eigen::Index i = 0; i < k; ++i) fix_sign(result.eigenvectors.col(i));
  finalize_residuals(parts, couplings, 1e-8, result);
  std::fill(result.converged.begin(), result.converged.end(), true);
  return result;
}

std::vector<double> dense_spectrum(const HamiltonianParts& parts, const Couplings& couplings,
                                   std::size_t dense_cap) {
  const std::size_t n = parts.dimension();
  if (n > dense_cap) {
    throw Error(ErrorCategory::dimension_too_large,
                fmt::format("dense spectrum of dimension {} exceeds cap {}", n, dense_cap));
  }
  const DenseSolution solution = solve_dense(to_dense(parts, couplings), false);
  return {solution.values.data(), solution.values.data() + solution.values.size()};
}

EigenResult lowest_eigenpairs(const HamiltonianParts& parts, const Couplings& couplings,
                              const LanczosOptions& options, std::span<const double> warm_start) {
  if (options.count < 1) throw Error(ErrorCategory::invalid_argument, "eigensolver: count must be >= 1");
  if (!(options.tol > 0.0)) throw Error(ErrorCategory::invalid_argument, "eigensolver: tol must be > 0");
  const auto n = static_cast<Eigen::Index>(parts.dimension());
  if (!warm_start.empty() && static_cast<Eigen::Index>(warm_start.size()) != n) {
    throw Error(ErrorCategory::dimension_mismatch, "eigensolver: warm start has the wrong dimension");
  }
  const int k = options.count;
  const int m_default = std::max(2 * k + 40, 60);
  const Eigen::Index m = std::min<Eigen::Index>(options.krylov_dim > 0 ? options.krylov_dim : m_default, n);

  if (static_cast<std::size_t>(n) <= options.dense_fallback || m <= k + 1) {
    return dense_eigenpairs(parts, couplings, k, std::max<std::size_t>(options.dense_fallback, n));
  }

  std::mt19937_64 rng(options.seed);
  Eigen::MatrixXd V(n, m + 1);
  Eigen::MatrixXd T = Eigen::MatrixXd::Zero(m, m);

  {
    Eigen::VectorXd noise = random_vector(n, rng);
    noise.normalize();
    Eigen::VectorXd start = noise;
    if (!warm_start.empty()) {
      const Eigen::Map<const Eigen::VectorXd> warm(warm_start.data(), n);
      const double norm = warm.norm();
      if (norm > 0.0) start = warm / norm + 1e-2 * noise;
    }
    V.col(0) = start.normalized();
  }

  auto op = [&](Eigen::Index col, Eigen::VectorXd& out) {
    matvec(parts, couplings, {V.col(col).data(), static_cast<std::size_t>(n)},
           {out.data(), static_cast<std::size_t>(n)});
  };

  EigenResult result;
  Eigen::VectorXd w(n);
  Eigen::Index kept = 0;
  double beta = 0.0;
  const double breakdown = 1e-13;

  for (int restart = 0; restart <= options.max_restarts; ++restart) {
    result.restarts = restart;
    for (Eigen::Index j = kept; j < m; ++j) {
      op(j, w);
      ++result.iterations;
      // Classical Gram-Schmidt applied twice.
      Eigen::VectorXd h = V.leftCols(j + 1).transpose() * w;
      w.noalias() -= V.leftCols(j + 1) * h;
      const Eigen::VectorXd h2 = V.leftCols(j + 1).transpose() * w;
      w.noalias() -= V.leftCols(j + 1) * h2;
      h += h2;
      T.col(j).head(j + 1) = h;
      T.row(j).head(j + 1) = h.transpose();
      beta = w.norm();
      if (beta < breakdown * std::max(1.0, std::abs(T(j, j)))) {
        // Invariant subspace: continue with a fresh direction, decoupled.
        beta = 0.0;
        w = random_vector(n, rng);
        for (int pass = 0; pass < 2; ++pass) w -= V.leftCols(j + 1) * (V.leftCols(j + 1).transpose() * w);
        V.col(j + 1) = w.normalized();
      } else {
        V.col(j + 1) = w / beta;
      }
    }

    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> ritz(T);
    const Eigen::VectorXd& theta = ritz.eigenvalues();
    const Eigen::MatrixXd& Y = ritz.eigenvectors();

    bool estimates_ok = true;
    for (int i = 0; i < k; ++i) {
      if (beta * std::abs(Y(m - 1, i)) > 0.5 * options.tol) estimates_ok = false;
    }

    const bool last = restart == options.max_restarts;
    if (estimates_ok || last) {
      result.eigenvalues.assign(theta.data(), theta.data() + k);
      result.eigenvectors = V.leftCols(m) * Y.leftCols(k);
      for (int i = 0; i < k; ++i) {
        auto col = result.eigenvectors.col(i);
        col.normalize();
        fix_sign(col);
      }
      finalize_residuals(parts, couplings, options.tol, result);
      if (result.all_converged() || last) return result;
    }

    // Thick restart: keep the lowest Ritz vectors plus the residual direction.
    const Eigen::Index keep = std::min<Eigen::Index>(m - 1, k + (m - k) / 2);
    const Eigen::MatrixXd kept_vectors = V.leftCols(m) * Y.leftCols(keep);
    const Eigen::VectorXd residual_direction = V.col(m);
    V.leftCols(keep) = kept_vectors;
    V.col(keep) = residual_direction;
    T.setZero();
    for (Eigen::Index i = 0; i < keep; ++i) T(i, i) = theta(i);
    kept = keep;
  }
  return result;
}

}  // namespace vortexed
