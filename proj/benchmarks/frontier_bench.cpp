#include <string>
#include <vector>

#include <benchmark/benchmark.h>

#include "costeval/pareto.hpp"
#include "costeval/random.hpp"

namespace {

using costeval::Decimal;
using costeval::Money;
using costeval::pareto::AccuracyRatio;
using costeval::pareto::ParetoPoint;

std::vector<ParetoPoint> random_points(std::size_t n) {
  const costeval::random::CounterRng rng(costeval::random::KeyBuilder().add("bench-frontier").hash());
  std::vector<ParetoPoint> pts;
  for (std::uint32_t i = 0; i < n; ++i) {
    ParetoPoint p;
    p.label = "s" + std::to_string(i);
    p.cost = Money(Decimal::from_integer(static_cast<std::int64_t>(rng.below(2 * i, 100000)))
                       .divided_rounded(1000, 3),
                   "USD");
    const auto hits = rng.below(2 * i + 1, 1001);
    p.accuracy = static_cast<double>(hits) / 1000.0;
    p.accuracy_exact = AccuracyRatio{hits, 1000};
    pts.push_back(p);
  }
  return pts;
}

void BM_NonDominated(benchmark::State& state) {
  const auto pts = random_points(static_cast<std::size_t>(state.range(0)));
  for (auto _ : state) benchmark::DoNotOptimize(costeval::pareto::non_dominated(pts));
  state.SetComplexityN(state.range(0));
}
BENCHMARK(BM_NonDominated)->RangeMultiplier(4)->Range(16, 4096)->Complexity();

void BM_ConvexFrontier(benchmark::State& state) {
  const auto pts = random_points(static_cast<std::size_t>(state.range(0)));
  for (auto _ : state) benchmark::DoNotOptimize(costeval::pareto::convex_frontier(pts));
  state.SetComplexityN(state.range(0));
}
BENCHMARK(BM_ConvexFrontier)->RangeMultiplier(4)->Range(16, 4096)->Complexity();

}  // namespace
