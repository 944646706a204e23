#include <vector>

#include <benchmark/benchmark.h>

#include "costeval/stats.hpp"

namespace {

void BM_StudentTQuantile(benchmark::State& state) {
  const double df = static_cast<double>(state.range(0));
  for (auto _ : state) benchmark::DoNotOptimize(costeval::stats::student_t_quantile(0.975, df));
}
BENCHMARK(BM_StudentTQuantile)->Arg(1)->Arg(4)->Arg(29)->Arg(1000);

void BM_TInterval(benchmark::State& state) {
  std::vector<double> v;
  for (int i = 0; i < state.range(0); ++i) v.push_back(0.5 + 0.01 * (i % 17));
  for (auto _ : state) benchmark::DoNotOptimize(costeval::stats::t_interval(v));
}
BENCHMARK(BM_TInterval)->Arg(5)->Arg(100);

}  // namespace
