// Serial reference vs OpenMP kernels. Thread count follows OMP_NUM_THREADS.

#include "sensas/oracle.hpp"
#include "sensas/paradigm.hpp"
#include "sensas/second_order.hpp"

#include <benchmark/benchmark.h>

#include <random>

namespace {

using namespace sensas;

Matrix dominant_matrix(Index n) {
  std::mt19937 rng(5);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  Matrix a(n, n);
  for (Index i = 0; i < a.size(); ++i) a.data()[i] = u(rng);
  a.diagonal().array() += static_cast<double>(n);
  return a;
}

// Eight regions: 24 parameters.
SlabConfig multi_region(Index cells) {
  SlabConfig cfg;
  cfg.length = 20.0;
  cfg.cells = cells;
  for (int r = 0; r < 8; ++r) {
    cfg.regions.push_back(SlabRegion{0.125, 0.5 + 0.1 * r, 0.05 + 0.01 * r, r % 2 == 0 ? 1.0 : 0.0});
  }
  cfg.detector = SlabDetector{0.6, 0.9, 1.0};
  cfg.response_kind = SlabResponse::quadratic_norm;
  return cfg;
}

template <Execution E>
void BM_Factorize(benchmark::State& state) {
  const Matrix a = dominant_matrix(state.range(0));
  for (auto _ : state) {
    SolveLedger ledger;
    benchmark::DoNotOptimize(factorize(a, ledger, E));
  }
}

template <Execution E>
void BM_SoAsapHessian(benchmark::State& state) {
  const Problem p = build_slab_diffusion(multi_region(state.range(0)));
  for (auto _ : state) benchmark::DoNotOptimize(so_asap_hessian(p, {}, E));
}

template <Execution E>
void BM_FdHessian(benchmark::State& state) {
  const Problem p = build_slab_diffusion(multi_region(state.range(0)));
  for (auto _ : state) benchmark::DoNotOptimize(fd_hessian(p, kHessianFDConfig, E));
}

}  // namespace

BENCHMARK(BM_Factorize<Execution::serial>)->Arg(128)->Arg(512)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_Factorize<Execution::parallel>)->Arg(128)->Arg(512)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_SoAsapHessian<Execution::serial>)->Arg(200)->Arg(800)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_SoAsapHessian<Execution::parallel>)->Arg(200)->Arg(800)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_FdHessian<Execution::serial>)->Arg(100)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_FdHessian<Execution::parallel>)->Arg(100)->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();
