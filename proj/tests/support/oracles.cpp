#include "oracles.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>
#include <stdexcept>

#include "vortexed/hamiltonian.hpp"
#include "vortexed/matelems.hpp"

namespace vortexed::oracle {

namespace {

double factorial(int n) {
  double f = 1.0;
  for (int i = 2; i <= n; ++i) f *= i;
  return f;
}

double binomial(int n, int k) {
  if (k < 0 || k > n) return 0.0;
  return factorial(n) / (factorial(k) * factorial(n - k));
}

std::vector<int> occupation(const FockBasis& basis, std::size_t i) {
  const auto occ = basis.state(i);
  return {occ.begin(), occ.end()};
}

std::optional<std::size_t> locate(const FockBasis& basis, const std::vector<int>& occ) {
  std::vector<Occupation> key(occ.size());
  for (std::size_t k = 0; k < occ.size(); ++k) {
    if (occ[k] < 0 || occ[k] > 255) return std::nullopt;
    key[k] = static_cast<Occupation>(occ[k]);
  }
  return basis.find(key);
}

}  // namespace

double laguerre_series(int n, int alpha, double x) {
  double sum = 0.0;
  for (int j = 0; j <= n; ++j) {
    sum += ((j % 2) ? -1.0 : 1.0) * binomial(n + alpha, n - j) * std::pow(x, j) / factorial(j);
  }
  return sum;
}

std::complex<double> orbital(const SpMode& mode, double x, double y) {
  const int am = std::abs(mode.m);
  const double r2 = x * x + y * y;
  const double norm = std::sqrt(factorial(mode.n) / (std::numbers::pi * factorial(mode.n + am)));
  const double radial = norm * std::pow(std::sqrt(r2), am) * laguerre_series(mode.n, am, r2) * std::exp(-0.5 * r2);
  const double theta = std::atan2(y, x);
  return radial * std::complex<double>(std::cos(mode.m * theta), std::sin(mode.m * theta));
}

CartesianGrid::CartesianGrid(double spacing, double extent) : h_(spacing) {
  const int half = static_cast<int>(std::ceil(extent / spacing));
  for (int i = -half; i <= half; ++i) axis_.push_back(i * spacing);
}

const std::vector<std::complex<double>>& CartesianGrid::values(const SpMode& mode) {
  auto [it, fresh] = cache_.try_emplace({mode.n, mode.m});
  if (fresh) {
    it->second.reserve(axis_.size() * axis_.size());
    for (double x : axis_) {
      for (double y : axis_) it->second.push_back(orbital(mode, x, y));
    }
  }
  return it->second;
}

double CartesianGrid::interaction(const SpMode& k, const SpMode& l, const SpMode& p, const SpMode& q) {
  const auto& vk = values(k);
  const auto& vl = values(l);
  const auto& vp = values(p);
  const auto& vq = values(q);
  std::complex<double> sum = 0.0;
  for (std::size_t i = 0; i < vk.size(); ++i) sum += std::conj(vk[i]) * std::conj(vl[i]) * vp[i] * vq[i];
  return sum.real() * h_ * h_;
}

double CartesianGrid::anisotropy(const SpMode& k, const SpMode& p) {
  const auto& vk = values(k);
  const auto& vp = values(p);
  std::complex<double> sum = 0.0;
  std::size_t i = 0;
  for (double x : axis_) {
    for (double y : axis_) {
      sum += std::conj(vp[i]) * (x * x - y * y) * vk[i];
      ++i;
    }
  }
  return sum.real() * h_ * h_;
}

double lll_interaction(int mk, int ml, int mp, int mq) {
  if (mk + ml != mp + mq) return 0.0;
  const int s = mk + ml;
  return factorial(s) / (2.0 * std::numbers::pi * std::pow(2.0, s) *
                         std::sqrt(factorial(mk) * factorial(ml) * factorial(mp) * factorial(mq)));
}

std::uint64_t partitions_at_most(int L, int N) {
  // p[n][l]: partitions of l into parts of size <= n, which equals the count
  // into at most n parts by conjugation.
  std::vector<std::vector<std::uint64_t>> p(static_cast<std::size_t>(N + 1),
                                            std::vector<std::uint64_t>(static_cast<std::size_t>(L + 1), 0));
  for (int n = 0; n <= N; ++n) p[n][0] = 1;
  for (int n = 1; n <= N; ++n) {
    for (int l = 1; l <= L; ++l) p[n][l] = p[n - 1][l] + (l >= n ? p[n][l - n] : 0);
  }
  return p[N][L];
}

std::vector<ParticleLabels> brute_force_states(const BasisSpec& spec) {
  const int budget = spec.landau_levels - 1;
  const int m_hi = spec.l_max + spec.particles * budget + 2;
  std::vector<std::pair<int, int>> labels;
  for (int n = 0; n <= budget; ++n) {
    for (int m = -budget - 1; m <= m_hi; ++m) {
      const int ll = n + (std::abs(m) - m) / 2;
      if (ll <= budget) labels.emplace_back(n, m);
    }
  }
  std::vector<ParticleLabels> out;
  ParticleLabels current;
  auto recurse = [&](auto&& self, std::size_t from) -> void {
    if (static_cast<int>(current.size()) == spec.particles) {
      int L = 0, excitation = 0;
      for (const auto& [n, m] : current) {
        L += m;
        excitation += n + (std::abs(m) - m) / 2;
      }
      if (excitation <= budget && L >= spec.l_min && L <= spec.l_max) out.push_back(current);
      return;
    }
    for (std::size_t i = from; i < labels.size(); ++i) {
      current.push_back(labels[i]);
      self(self, i);
      current.pop_back();
    }
  };
  recurse(recurse, 0);
  for (auto& s : out) std::sort(s.begin(), s.end());
  std::sort(out.begin(), out.end());
  return out;
}

ParticleLabels labels_of(const FockBasis& basis, std::size_t i) {
  ParticleLabels out;
  const auto occ = basis.state(i);
  for (std::size_t k = 0; k < occ.size(); ++k) {
    for (int c = 0; c < occ[k]; ++c) out.emplace_back(basis.modes()[k].n, basis.modes()[k].m);
  }
  std::sort(out.begin(), out.end());
  return out;
}

Eigen::MatrixXd dense_hamiltonian(const FockBasis& basis, double omega, double g, double anisotropy) {
  const auto& modes = basis.modes();
  const std::size_t M = modes.size();
  const auto D = static_cast<Eigen::Index>(basis.size());
  std::vector<double> I(M * M * M * M);
  auto idx = [M](std::size_t k, std::size_t l, std::size_t p, std::size_t q) { return ((k * M + l) * M + p) * M + q; };
  for (std::size_t k = 0; k < M; ++k)
    for (std::size_t l = 0; l < M; ++l)
      for (std::size_t p = 0; p < M; ++p)
        for (std::size_t q = 0; q < M; ++q) I[idx(k, l, p, q)] = interaction_element(modes[k], modes[l], modes[p], modes[q]);

  Eigen::MatrixXd H = Eigen::MatrixXd::Zero(D, D);
  for (Eigen::Index j = 0; j < D; ++j) {
    const auto ju = static_cast<std::size_t>(j);
    const std::vector<int> occ = occupation(basis, ju);
    double diag = 0.0;
    for (std::size_t k = 0; k < M; ++k) diag += occ[k] * (2.0 * modes[k].n + std::abs(modes[k].m) + 1.0);
    H(j, j) += diag - omega * basis.angular_momentum(ju);

    // (g/2) a+_k a+_l a_q a_p
    for (std::size_t p = 0; p < M; ++p) {
      for (std::size_t q = 0; q < M; ++q) {
        std::vector<int> s = occ;
        if (s[p] == 0) continue;
        double amp = std::sqrt(s[p]);
        --s[p];
        if (s[q] == 0) continue;
        amp *= std::sqrt(s[q]);
        --s[q];
        for (std::size_t k = 0; k < M; ++k) {
          for (std::size_t l = 0; l < M; ++l) {
            const double v = I[idx(k, l, p, q)];
            if (v == 0.0) continue;
            std::vector<int> t = s;
            double a2 = std::sqrt(t[l] + 1.0);
            ++t[l];
            a2 *= std::sqrt(t[k] + 1.0);
            ++t[k];
            if (const auto i = locate(basis, t)) H(static_cast<Eigen::Index>(*i), j) += 0.5 * g * v * amp * a2;
          }
        }
      }
    }

    // A * sum_{k,p} <p|x^2-y^2|k> a+_p a_k
    for (std::size_t k = 0; k < M; ++k) {
      if (occ[k] == 0) continue;
      for (std::size_t p = 0; p < M; ++p) {
        const double w = anisotropy_element(modes[k], modes[p]);
        if (w == 0.0) continue;
        std::vector<int> t = occ;
        double amp = std::sqrt(t[k]);
        --t[k];
        amp *= std::sqrt(t[p] + 1.0);
        ++t[p];
        if (const auto i = locate(basis, t)) {
          H(static_cast<Eigen::Index>(*i), j) += kAnisotropyPrefactor * anisotropy * w * amp;
        }
      }
    }
  }
  return H;
}

std::vector<double> noninteracting_energies(const FockBasis& basis, double omega) {
  std::vector<double> out(basis.size());
  for (std::size_t i = 0; i < basis.size(); ++i) {
    const auto occ = basis.state(i);
    double e = 0.0;
    int L = 0;
    for (std::size_t k = 0; k < occ.size(); ++k) {
      const SpMode& m = basis.modes()[k];
      e += occ[k] * (2.0 * m.n + std::abs(m.m) + 1.0);
      L += occ[k] * m.m;
    }
    out[i] = e - omega * L;
  }
  return out;
}

Eigen::MatrixXd spdm(std::span<const double> state, const FockBasis& basis) {
  const std::size_t M = basis.mode_count();
  Eigen::MatrixXd rho = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(M), static_cast<Eigen::Index>(M));
  for (std::size_t j = 0; j < basis.size(); ++j) {
    const std::vector<int> occ = occupation(basis, j);
    for (std::size_t l = 0; l < M; ++l) {
      if (occ[l] == 0) continue;
      for (std::size_t k = 0; k < M; ++k) {
        std::vector<int> t = occ;
        double amp = std::sqrt(t[l]);
        --t[l];
        amp *= std::sqrt(t[k] + 1.0);
        ++t[k];
        if (const auto i = locate(basis, t)) {
          rho(static_cast<Eigen::Index>(k), static_cast<Eigen::Index>(l)) += state[*i] * amp * state[j];
        }
      }
    }
  }
  return rho;
}

std::vector<double> rotate(std::span<const double> state, const FockBasis& basis, const Eigen::MatrixXd& u,
                           const FullFockSpace& space) {
  const std::size_t M = basis.mode_count();
  if (static_cast<std::size_t>(u.rows()) != M || u.cols() != u.rows()) throw std::invalid_argument("rotate: u must be square");
  const int N = basis.spec().particles;
  std::vector<double> out(space.size(), 0.0);
  for (std::size_t i = 0; i < basis.size(); ++i) {
    const auto occ = basis.state(i);
    // a+_k = sum_j u(k, j) b+_j; expand the product of N creation operators.
    std::vector<std::size_t> created;
    double norm = 1.0;
    for (std::size_t k = 0; k < M; ++k) {
      for (int c = 0; c < occ[k]; ++c) created.push_back(k);
      norm *= std::sqrt(factorial(occ[k]));
    }
    std::vector<std::size_t> target(static_cast<std::size_t>(N), 0);
    while (true) {
      double coeff = state[i] / norm;
      std::vector<Occupation> result(M, 0);
      for (int t = 0; t < N; ++t) {
        coeff *= u(static_cast<Eigen::Index>(created[t]), static_cast<Eigen::Index>(target[t]));
        ++result[target[t]];
      }
      for (std::size_t j = 0; j < M; ++j) coeff *= std::sqrt(factorial(result[j]));
      out[*space.find(result)] += coeff;
      int t = 0;
      while (t < N && ++target[t] == M) target[t++] = 0;
      if (t == N) break;
    }
  }
  return out;
}

Eigen::MatrixXd random_orthogonal(int size, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> dist;
  Eigen::MatrixXd a(size, size);
  for (int i = 0; i < size; ++i)
    for (int j = 0; j < size; ++j) a(i, j) = dist(rng);
  Eigen::HouseholderQR<Eigen::MatrixXd> qr(a);
  return qr.householderQ() * Eigen::MatrixXd::Identity(size, size);
}

std::vector<double> random_state(std::size_t size, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> dist;
  std::vector<double> v(size);
  double n2 = 0.0;
  for (double& x : v) {
    x = dist(rng);
    n2 += x * x;
  }
  for (double& x : v) x /= std::sqrt(n2);
  return v;
}

}  // namespace vortexed::oracle
