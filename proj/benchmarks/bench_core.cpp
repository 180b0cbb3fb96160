#include <complex>
#include <memory>

#include <benchmark/benchmark.h>

#include "bht/fock_basis.hpp"
#include "bht/hamiltonian.hpp"
#include "bht/linalg.hpp"
#include "bht/protocol.hpp"

namespace {

void BM_EnumerateSector(benchmark::State& state) {
  const int L = static_cast<int>(state.range(0));
  const int N = static_cast<int>(state.range(1));
  for (auto _ : state) benchmark::DoNotOptimize(bht::enumerate_sector(L, N).size());
  state.SetItemsProcessed(state.iterations() * bht::dimension(L, N));
}
BENCHMARK(BM_EnumerateSector)->Args({6, 4})->Args({6, 12})->Args({6, 17})->Args({12, 8});

void BM_BuildHamiltonian(benchmark::State& state) {
  const int N = static_cast<int>(state.range(0));
  const bht::SectorBasis basis(6, N);
  const bht::ModelParams params{1.0, 1.42, bht::potential_vertical(6, 10.0)};
  for (auto _ : state) benchmark::DoNotOptimize(bht::build_hamiltonian(basis, params).upper_nonzeros());
  state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(basis.size()));
}
BENCHMARK(BM_BuildHamiltonian)->Arg(4)->Arg(12)->Arg(17);

void BM_ComplexMatvec(benchmark::State& state) {
  const bht::SectorBasis basis(6, static_cast<int>(state.range(0)));
  const auto H = bht::build_hamiltonian(basis, {1.0, 1.42, bht::potential_vertical(6, 10.0)});
  const Eigen::VectorXcd x = Eigen::VectorXcd::Constant(static_cast<Eigen::Index>(basis.size()), {0.1, 0.2});
  Eigen::VectorXcd y(x.size());
  for (auto _ : state) {
    H.multiply(std::span<const std::complex<double>>(x.data(), static_cast<std::size_t>(x.size())),
               std::span<std::complex<double>>(y.data(), static_cast<std::size_t>(y.size())));
    benchmark::DoNotOptimize(y.data());
  }
  state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(basis.size()));
}
BENCHMARK(BM_ComplexMatvec)->Arg(4)->Arg(17);

void BM_DenseEigensolver(benchmark::State& state) {
  const bht::SectorBasis basis(static_cast<int>(state.range(0)), static_cast<int>(state.range(1)));
  const auto H = bht::build_hamiltonian(basis, {1.0, 1.42, bht::potential_vertical(basis.sites(), 10.0)});
  for (auto _ : state) benchmark::DoNotOptimize(bht::eigh_dense(H).energies(0));
}
BENCHMARK(BM_DenseEigensolver)->Args({6, 4})->Args({8, 4})->Args({6, 8})->Unit(benchmark::kMillisecond);

void BM_LanczosGroundState(benchmark::State& state) {
  const bht::SectorBasis basis(6, static_cast<int>(state.range(0)));
  const auto H = bht::build_hamiltonian(basis, {1.0, 1.42, bht::potential_cooling(6, 10.0)});
  bht::GroundStateOptions o;
  o.force_iterative = true;
  for (auto _ : state) benchmark::DoNotOptimize(bht::ground_state(H, o).energy);
}
BENCHMARK(BM_LanczosGroundState)->Arg(8)->Arg(17)->Unit(benchmark::kMillisecond);

void BM_KrylovTrajectory(benchmark::State& state) {
  const bht::SectorBasis basis(6, static_cast<int>(state.range(0)));
  const auto H = bht::build_hamiltonian(basis, {1.0, 1.42, bht::potential_vertical(6, 10.0)});
  const Eigen::VectorXcd psi0 = Eigen::VectorXcd::Unit(static_cast<Eigen::Index>(basis.size()), 0);
  const auto times = bht::time_grid(5.0, 0.05);
  bht::KrylovOptions ko;
  ko.reorthogonalize = state.range(1) != 0;
  for (auto _ : state) {
    const auto stats = bht::evolve_krylov(H, psi0, times, ko, [](std::size_t, const Eigen::VectorXcd&) {});
    benchmark::DoNotOptimize(stats.matvecs);
  }
}
BENCHMARK(BM_KrylovTrajectory)->Args({12, 0})->Args({17, 0})->Args({17, 1})->Unit(benchmark::kMillisecond);

void BM_QuenchWorkingPoint(benchmark::State& state) {
  bht::QuenchSpec spec;
  spec.times = bht::time_grid(50.0, 0.05);
  for (auto _ : state) benchmark::DoNotOptimize(bht::run_quench(spec).n_after.back());
}
BENCHMARK(BM_QuenchWorkingPoint)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
