#include <benchmark/benchmark.h>

#include <vector>

#include "vortexed/eigensolver.hpp"
#include "vortexed/hamiltonian.hpp"

namespace {

using namespace vortexed;

BasisSpec spec_for(int n_ll) { return {12, n_ll, n_ll == 1 ? 0 : -2, 16}; }

void bm_basis(benchmark::State& state) {
  const auto spec = spec_for(static_cast<int>(state.range(0)));
  std::size_t size = 0;
  for (auto _ : state) {
    FockBasis basis(spec);
    size = basis.size();
    benchmark::DoNotOptimize(size);
  }
  state.counters["dimension"] = static_cast<double>(size);
}

void bm_assemble(benchmark::State& state) {
  const FockBasis basis(spec_for(static_cast<int>(state.range(0))));
  const auto tables = build_tables(basis.modes());
  for (auto _ : state) {
    auto parts = assemble(basis, tables);
    benchmark::DoNotOptimize(parts.interaction.nnz());
  }
  state.counters["dimension"] = static_cast<double>(basis.size());
}

void bm_matvec(benchmark::State& state) {
  const FockBasis basis(spec_for(static_cast<int>(state.range(0))));
  const auto parts = assemble(basis, build_tables(basis.modes()));
  std::vector<double> x(basis.size(), 1.0), y(basis.size());
  const Couplings c{0.8, 0.5, 0.03};
  for (auto _ : state) {
    matvec(parts, c, x, y);
    benchmark::ClobberMemory();
  }
  state.counters["nnz"] = static_cast<double>(parts.interaction.nnz() + parts.anisotropy.nnz());
}

void bm_ground_state(benchmark::State& state) {
  const FockBasis basis(spec_for(static_cast<int>(state.range(0))));
  const auto parts = assemble(basis, build_tables(basis.modes()));
  LanczosOptions options;
  options.count = 2;
  for (auto _ : state) {
    auto r = lowest_eigenpairs(parts, {0.8, 0.5, 0.03}, options);
    benchmark::DoNotOptimize(r.eigenvalues.data());
  }
}

BENCHMARK(bm_basis)->Arg(1)->Arg(2)->Unit(benchmark::kMillisecond);
BENCHMARK(bm_assemble)->Arg(1)->Arg(2)->Unit(benchmark::kMillisecond);
BENCHMARK(bm_matvec)->Arg(1)->Arg(2)->Unit(benchmark::kMicrosecond);
BENCHMARK(bm_ground_state)->Arg(1)->Arg(2)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
