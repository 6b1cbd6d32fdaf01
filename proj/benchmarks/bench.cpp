#include <benchmark/benchmark.h>

#include "emdenflow/bifurcation.hpp"
#include "emdenflow/classifier.hpp"
#include "emdenflow/equilibria.hpp"
#include "emdenflow/manifolds.hpp"

namespace {

using namespace emdenflow;

void BM_FindEquilibria(benchmark::State& state) {
  const ProblemParams pr{3, 2, -2};
  for (auto _ : state) benchmark::DoNotOptimize(find_equilibria(pr));
}
BENCHMARK(BM_FindEquilibria);

void BM_IntegrateRegular(benchmark::State& state) {
  const ProblemParams pr{3, 7, 0.1};
  IntegrationConfig c;
  c.t1 = static_cast<double>(state.range(0));
  for (const Equilibrium& e : find_equilibria(pr)) c.targets.push_back({e.x, e.y});
  const SeedDescriptor s = seed_regular(pr);
  for (auto _ : state) benchmark::DoNotOptimize(integrate(pr, s, c));
}
BENCHMARK(BM_IntegrateRegular)->Arg(50)->Arg(400)->Unit(benchmark::kMillisecond);

void BM_FindCycleSobolev(benchmark::State& state) {
  const ProblemParams pr{3, 5, 0};
  const Equilibrium e = find_equilibria(pr)[0];
  for (auto _ : state) benchmark::DoNotOptimize(find_cycle(pr, {1.2 * e.x, 0.6 * e.x}));
}
BENCHMARK(BM_FindCycleSobolev)->Unit(benchmark::kMillisecond);

void BM_ShootGPoint(benchmark::State& state) {
  const ProblemParams pr{3, 7, *m_node_hi(3, 7)};
  for (auto _ : state) benchmark::DoNotOptimize(shoot_g_at(pr));
}
BENCHMARK(BM_ShootGPoint)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
