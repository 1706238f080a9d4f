#include <benchmark/benchmark.h>

#include "rik/generate.hpp"
#include "rik/interpolation.hpp"
#include "rik/majorization.hpp"
#include "rik/operators.hpp"
#include "rik/spaces.hpp"

using namespace rik;

namespace {

void BM_rearrange(benchmark::State& state) {
  Rng rng(1);
  const auto x = random_grid_function(rng, static_cast<int>(state.range(0)),
                                      false, false);
  for (auto _ : state) benchmark::DoNotOptimize(rearrange(x));
}
BENCHMARK(BM_rearrange)->Range(64, 8192);

void BM_hlp_leq(benchmark::State& state) {
  Rng rng(2);
  const int n = static_cast<int>(state.range(0));
  const auto g = random_grid_function(rng, n, true, false);
  const auto avg = OperatorExpr::partition_average(
      PartitionFamily(unit_space, {{0.0, 1.0}}), true);
  const auto f = apply(avg, g);
  for (auto _ : state) benchmark::DoNotOptimize(hlp_leq(f, g, 1e-10));
}
BENCHMARK(BM_hlp_leq)->Range(64, 8192);

void BM_transfer_construction(benchmark::State& state) {
  Rng rng(3);
  const auto n = static_cast<std::size_t>(state.range(0));
  const auto [f, g] = random_majorizing_pair(rng, n, false);
  for (auto _ : state)
    benchmark::DoNotOptimize(construct_doubly_stochastic(f, g));
}
BENCHMARK(BM_transfer_construction)->Range(8, 64);

void BM_partition_average(benchmark::State& state) {
  Rng rng(4);
  const int level = static_cast<int>(state.range(0));
  const auto op = OperatorExpr::partition_average(
      PartitionFamily(unit_space, dyadic_cells(level, unit_space)), true);
  const auto x = staircase(10);
  for (auto _ : state) benchmark::DoNotOptimize(apply(op, x));
}
BENCHMARK(BM_partition_average)->DenseRange(2, 10, 2);

void BM_circulant_apply(benchmark::State& state) {
  const int n = static_cast<int>(state.range(0));
  std::vector<double> w(static_cast<std::size_t>(n), 0.0);
  for (int i = 0; i < 16 && i < n; ++i)
    w[static_cast<std::size_t>(i)] = 1.0 / std::min(16, n);
  const auto op = OperatorExpr::circulant(w, Grid{n, 1.0 / n});
  Rng rng(5);
  const auto x = random_dyadic_function(
      rng, static_cast<int>(std::log2(n)), true);
  for (auto _ : state) benchmark::DoNotOptimize(apply(op, x));
}
BENCHMARK(BM_circulant_apply)->Range(64, 2048);

void BM_phi_theta_q(benchmark::State& state) {
  Rng rng(6);
  const auto x = random_grid_function(rng, static_cast<int>(state.range(0)),
                                      true, false);
  const auto K = k_profile(x);
  for (auto _ : state) benchmark::DoNotOptimize(phi_theta_q(K, 0.5, 2.0));
}
BENCHMARK(BM_phi_theta_q)->Range(64, 4096);

}  // namespace

BENCHMARK_MAIN();
