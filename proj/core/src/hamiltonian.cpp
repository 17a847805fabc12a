#include "vortexed/hamiltonian.hpp"

#include <algorithm>
#include <cmath>

#include <fmt/format.h>

#include "vortexed/error.hpp"

namespace vortexed {

double CsrMatrix::at(std::size_t i, std::size_t j) const noexcept {
  const auto begin = cols.begin() + static_cast<std::ptrdiff_t>(row_ptr[i]);
  const auto end = cols.begin() + static_cast<std::ptrdiff_t>(row_ptr[i + 1]);
  const auto it = std::lower_bound(begin, end, static_cast<std::uint32_t>(j));
  if (it == end || *it != j) return 0.0;
  return values[static_cast<std::size_t>(it - cols.begin())];
}

namespace {

struct Triplet {
  std::uint32_t col;
  double value;
};

// Sorts, merges duplicate columns and appends to the row-wise triplet store.
void merge_row(std::vector<Triplet>& row) {
  std::sort(row.begin(), row.end(), [](const Triplet& a, const Triplet& b) { return a.col < b.col; });
  std::size_t out = 0;
  for (std::size_t i = 0; i < row.size();) {
    Triplet acc = row[i++];
    while (i < row.size() && row[i].col == acc.col) acc.value += row[i++].value;
    if (acc.value != 0.0) row[out++] = acc;
  }
  row.resize(out);
}

// Builds a CSR matrix from per-row entries, keeping only the upper triangle of
// each row and mirroring it so that (i,j) and (j,i) are bitwise equal.
CsrMatrix symmetric_from_rows(const std::vector<std::vector<Triplet>>& rows) {
  const std::size_t n = rows.size();
  std::vector<std::size_t> counts(n, 0);
  for (std::size_t i = 0; i < n; ++i) {
    for (const Triplet& t : rows[i]) {
      if (t.col < i) continue;
      ++counts[i];
      if (t.col != i) ++counts[t.col];
    }
  }
  CsrMatrix m;
  m.rows = n;
  m.row_ptr.assign(n + 1, 0);
  for (std::size_t i = 0; i < n; ++i) m.row_ptr[i + 1] = m.row_ptr[i] + counts[i];
  m.cols.resize(m.row_ptr[n]);
  m.values.resize(m.row_ptr[n]);
  std::vector<std::size_t> cursor(m.row_ptr.begin(), m.row_ptr.end() - 1);
  // Row i receives its lower-triangle entries (from earlier rows) before its
  // own diagonal and upper entries, so columns stay sorted.
  for (std::size_t i = 0; i < n; ++i) {
    for (const Triplet& t : rows[i]) {
      if (t.col < i) continue;
      const std::size_t slot = cursor[i]++;
      m.cols[slot] = t.col;
      m.values[slot] = t.value;
      if (t.col != i) {
        const std::size_t mirror = cursor[t.col]++;
        m.cols[mirror] = static_cast<std::uint32_t>(i);
        m.values[mirror] = t.value;
      }
    }
  }
  return m;
}

double pair_removal_amplitude(const std::vector<int>& occ, std::size_t p, std::size_t q) {
  if (p == q) return occ[p] >= 2 ? std::sqrt(static_cast<double>(occ[p]) * (occ[p] - 1)) : 0.0;
  return std::sqrt(static_cast<double>(occ[p]) * occ[q]);
}

double pair_creation_amplitude(const std::vector<int>& occ, std::size_t k, std::size_t l) {
  if (k == l) return std::sqrt((occ[k] + 1.0) * (occ[k] + 2.0));
  return std::sqrt((occ[k] + 1.0) * (occ[l] + 1.0));
}

}  // namespace

HamiltonianParts assemble(const FockBasis& basis, const MatrixElementTables& tables) {
  const std::size_t M = basis.mode_count();
  if (tables.interaction.mode_count() != M || tables.anisotropy.mode_count() != M) {
    throw Error(ErrorCategory::missing_table_entry,
                fmt::format("tables cover {} / {} modes but the basis has {}",
                            tables.interaction.mode_count(), tables.anisotropy.mode_count(), M));
  }
  const std::size_t dim = basis.size();
  const auto& modes = basis.modes();

  HamiltonianParts parts;
  parts.h0_diag.resize(dim);
  parts.lz_diag.resize(dim);

  std::vector<std::vector<Triplet>> v_rows(dim);
  std::vector<std::vector<Triplet>> w_rows(dim);

#pragma omp parallel
  {
    std::vector<int> occ(M);
    std::vector<Occupation> target(M);
#pragma omp for schedule(dynamic, 64)
    for (std::size_t i = 0; i < dim; ++i) {
      const auto state = basis.state(i);
      double energy = 0.0;
      for (std::size_t k = 0; k < M; ++k) {
        occ[k] = state[k];
        energy += state[k] * modes[k].energy();
      }
      parts.h0_diag[i] = energy;
      parts.lz_diag[i] = basis.angular_momentum(i);

      auto lookup = [&]() -> std::optional<std::size_t> {
        for (std::size_t k = 0; k < M; ++k) target[k] = static_cast<Occupation>(occ[k]);
        return basis.find(target);
      };

      // Interaction: (1/2) sum over unordered pairs with multiplicity factors.
      auto& v_row = v_rows[i];
      for (std::size_t p = 0; p < M; ++p) {
        if (occ[p] == 0) continue;
        for (std::size_t q = p; q < M; ++q) {
          const double remove = pair_removal_amplitude(occ, p, q);
          if (remove == 0.0) continue;
          const double s_pq = p == q ? 1.0 : 2.0;
          --occ[p];
          --occ[q];
          for (const auto& t : tables.interaction.from_pair(p, q)) {
            const double create = pair_creation_amplitude(occ, t.k, t.l);
            const double s_kl = t.k == t.l ? 1.0 : 2.0;
            ++occ[t.k];
            ++occ[t.l];
            if (const auto j = lookup()) {
              v_row.push_back({static_cast<std::uint32_t>(*j), 0.5 * s_pq * s_kl * t.value * remove * create});
            }
            --occ[t.k];
            --occ[t.l];
          }
          ++occ[p];
          ++occ[q];
        }
      }
      merge_row(v_row);

      // Anisotropy: sum_{k,p} W(k->p) a+_p a_k.
      auto& w_row = w_rows[i];
      for (std::size_t k = 0; k < M; ++k) {
        if (occ[k] == 0) continue;
        const double remove = std::sqrt(static_cast<double>(occ[k]));
        --occ[k];
        for (const auto& e : tables.anisotropy.from_mode(k)) {
          const double create = std::sqrt(occ[e.to] + 1.0);
          ++occ[e.to];
          if (const auto j = lookup()) {
            w_row.push_back({static_cast<std::uint32_t>(*j), e.value * remove * create});
          }
          --occ[e.to];
        }
        ++occ[k];
      }
      merge_row(w_row);
    }
  }

  parts.interaction = symmetric_from_rows(v_rows);
  parts.anisotropy = symmetric_from_rows(w_rows);
  return parts;
}

void matvec(const HamiltonianParts& parts, const Couplings& couplings, std::span<const double> x,
            std::span<double> y) {
  const std::size_t dim = parts.dimension();
  if (x.size() != dim || y.size() != dim) {
    throw Error(ErrorCategory::dimension_mismatch,
                fmt::format("matvec: vector sizes {} / {} do not match dimension {}", x.size(), y.size(), dim));
  }
  const double omega = couplings.omega;
  const double g = couplings.g;
  const double a = kAnisotropyPrefactor * couplings.anisotropy;
  const auto& V = parts.interaction;
  const auto& W = parts.anisotropy;
  const bool use_w = a != 0.0;

#pragma omp parallel for schedule(static)
  for (std::size_t i = 0; i < dim; ++i) {
    double acc_v = 0.0;
    for (std::size_t e = V.row_ptr[i]; e < V.row_ptr[i + 1]; ++e) acc_v += V.values[e] * x[V.cols[e]];
    double acc_w = 0.0;
    if (use_w) {
      for (std::size_t e = W.row_ptr[i]; e < W.row_ptr[i + 1]; ++e) acc_w += W.values[e] * x[W.cols[e]];
    }
    y[i] = (parts.h0_diag[i] - omega * parts.lz_diag[i]) * x[i] + g * acc_v + a * acc_w;
  }
}

std::vector<double> matvec(const HamiltonianParts& parts, const Couplings& couplings,
                           std::span<const double> x) {
  std::vector<double> y(parts.dimension());
  matvec(parts, couplings, x, y);
  return y;
}

Eigen::MatrixXd to_dense(const HamiltonianParts& parts, const Couplings& couplings) {
  const auto n = static_cast<Eigen::Index>(parts.dimension());
  Eigen::MatrixXd h = Eigen::MatrixXd::Zero(n, n);
  const double a = kAnisotropyPrefactor * couplings.anisotropy;
  for (Eigen::Index i = 0; i < n; ++i) {
    const auto r = static_cast<std::size_t>(i);
    h(i, i) += parts.h0_diag[r] - couplings.omega * parts.lz_diag[r];
    for (std::size_t e = parts.interaction.row_ptr[r]; e < parts.interaction.row_ptr[r + 1]; ++e) {
      h(i, parts.interaction.cols[e]) += couplings.g * parts.interaction.values[e];
    }
    for (std::size_t e = parts.anisotropy.row_ptr[r]; e < parts.anisotropy.row_ptr[r + 1]; ++e) {
      h(i, parts.anisotropy.cols[e]) += a * parts.anisotropy.values[e];
    }
  }
  return h;
}

namespace {

CsrMatrix restrict_csr(const CsrMatrix& m, IndexRange range) {
  CsrMatrix out;
  out.rows = range.size();
  out.row_ptr.assign(out.rows + 1, 0);
  for (std::size_t i = range.begin; i < range.end; ++i) {
    for (std::size_t e = m.row_ptr[i]; e < m.row_ptr[i + 1]; ++e) {
      if (!range.contains(m.cols[e])) continue;
      out.cols.push_back(static_cast<std::uint32_t>(m.cols[e] - range.begin));
      out.values.push_back(m.values[e]);
    }
    out.row_ptr[i - range.begin + 1] = out.values.size();
  }
  return out;
}

}  // namespace

HamiltonianParts restrict_to(const HamiltonianParts& parts, IndexRange range) {
  if (range.end > parts.dimension() || range.begin > range.end) {
    throw Error(ErrorCategory::dimension_mismatch, "restrict_to: range outside the Hamiltonian");
  }
  HamiltonianParts out;
  out.h0_diag.assign(parts.h0_diag.begin() + static_cast<std::ptrdiff_t>(range.begin),
                     parts.h0_diag.begin() + static_cast<std::ptrdiff_t>(range.end));
  out.lz_diag.assign(parts.lz_diag.begin() + static_cast<std::ptrdiff_t>(range.begin),
                     parts.lz_diag.begin() + static_cast<std::ptrdiff_t>(range.end));
  out.interaction = restrict_csr(parts.interaction, range);
  out.anisotropy = restrict_csr(parts.anisotropy, range);
  return out;
}

}  // namespace vortexed
