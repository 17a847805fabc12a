#include <doctest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "oracles.hpp"
#include "vortexed/matelems.hpp"

using namespace vortexed;

TEST_SUITE("matelems") {
  TEST_CASE("Gauss-Laguerre integrates monomials exactly") {
    for (int order : {1, 3, 8, 15}) {
      const auto& rule = gauss_laguerre(order);
      double factorial = 1.0;
      for (int j = 0; j <= 2 * order - 1; ++j) {
        if (j > 0) factorial *= j;
        double sum = 0.0;
        for (std::size_t i = 0; i < rule.nodes.size(); ++i) sum += rule.weights[i] * std::pow(rule.nodes[i], j);
        CAPTURE(order);
        CAPTURE(j);
        CHECK(sum == doctest::Approx(factorial).epsilon(1e-12));
      }
    }
  }

  TEST_CASE("radial wavefunction matches the series form") {
    for (const SpMode mode : {SpMode{0, 0}, SpMode{1, 0}, SpMode{0, -1}, SpMode{1, 3}, SpMode{2, -2}}) {
      for (double r : {0.0, 0.3, 1.1, 2.5}) {
        CHECK(radial_wavefunction(mode, r) == doctest::Approx(oracle::orbital(mode, r, 0.0).real()).epsilon(1e-12));
      }
    }
  }

  TEST_CASE("pair in the lowest mode") {
    const SpMode z{0, 0};
    CHECK(interaction_element(z, z, z, z) == doctest::Approx(1.0 / (2.0 * std::numbers::pi)).epsilon(1e-15));
  }

  TEST_CASE("LLL closed form") {
    for (int mk = 0; mk <= 6; ++mk)
      for (int ml = 0; ml <= 6; ++ml)
        for (int mp = 0; mp <= 6; ++mp) {
          const int mq = mk + ml - mp;
          if (mq < 0 || mq > 6) continue;
          const double exact = oracle::lll_interaction(mk, ml, mp, mq);
          CHECK(interaction_element({0, mk}, {0, ml}, {0, mp}, {0, mq}) == doctest::Approx(exact).epsilon(1e-13));
        }
  }

  TEST_CASE("interaction elements against Cartesian integration") {
    const auto modes = enumerate_modes(3, 4);
    oracle::CartesianGrid grid(0.1, 9.0);
    std::mt19937_64 rng(7);
    std::uniform_int_distribution<std::size_t> pick(0, modes.size() - 1);
    int checked = 0;
    for (int trial = 0; trial < 400 && checked < 40; ++trial) {
      const SpMode k = modes[pick(rng)], l = modes[pick(rng)], p = modes[pick(rng)];
      SpMode q = modes[pick(rng)];
      if (trial % 4 != 0) {
        // steer most samples onto m-conserving quadruples
        const int mq = k.m + l.m - p.m;
        const auto it = std::find_if(modes.begin(), modes.end(), [&](const SpMode& s) { return s.m == mq && s.n == q.n; });
        if (it == modes.end()) continue;
        q = *it;
      }
      ++checked;
      CAPTURE(k.n); CAPTURE(k.m); CAPTURE(l.n); CAPTURE(l.m);
      CAPTURE(p.n); CAPTURE(p.m); CAPTURE(q.n); CAPTURE(q.m);
      CHECK(std::abs(interaction_element(k, l, p, q) - grid.interaction(k, l, p, q)) <= 1e-8);
    }
    CHECK(checked == 40);
  }

  TEST_CASE("quadrature order is already exact") {
    const auto modes = enumerate_modes(3, 3);
    for (const auto& k : modes)
      for (const auto& l : modes)
        for (const auto& p : modes)
          for (const auto& q : modes) {
            if (k.m + l.m != p.m + q.m) continue;
            const double base = interaction_element(k, l, p, q);
            const double doubled = interaction_element(k, l, p, q, 40);
            CHECK(std::abs(base - doubled) <= 1e-13 * (1.0 + std::abs(base)));
          }
  }

  TEST_CASE("anisotropy elements") {
    CHECK(anisotropy_element({0, 0}, {0, 2}) == doctest::Approx(1.0 / std::sqrt(2.0)).epsilon(1e-14));
    const auto modes = enumerate_modes(2, 5);
    oracle::CartesianGrid grid(0.1, 9.0);
    for (const auto& k : modes)
      for (const auto& p : modes) {
        const double w = anisotropy_element(k, p);
        if (std::abs(k.m - p.m) != 2) CHECK(w == 0.0);
        CHECK(std::abs(w - anisotropy_element(p, k)) <= 1e-14 * (1.0 + std::abs(w)));
        CHECK(std::abs(w - grid.anisotropy(k, p)) <= 1e-8);
        CHECK(std::abs(w - anisotropy_element(k, p, 30)) <= 1e-13);
      }
  }

  TEST_CASE("tables fold orderings and drop zeros") {
    const auto modes = enumerate_modes(2, 4);
    const auto tables = build_tables(modes);
    const auto M = modes.size();
    for (std::size_t k = 0; k < M; ++k)
      for (std::size_t l = 0; l < M; ++l)
        for (std::size_t p = 0; p < M; ++p)
          for (std::size_t q = 0; q < M; ++q) {
            const double raw = interaction_element(modes[k], modes[l], modes[p], modes[q]);
            const double stored = tables.interaction.value(k, l, p, q);
            if (std::abs(raw) < kZeroThreshold) {
              CHECK(stored == 0.0);
            } else {
              CHECK(stored == doctest::Approx(raw).epsilon(1e-14));
              CHECK(stored == tables.interaction.value(l, k, q, p));
              CHECK(stored == tables.interaction.value(p, q, k, l));
            }
          }
    for (std::size_t k = 0; k < M; ++k)
      for (std::size_t p = 0; p < M; ++p) CHECK(tables.anisotropy.value(k, p) == tables.anisotropy.value(p, k));
  }
}
