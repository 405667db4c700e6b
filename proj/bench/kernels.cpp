// Parallel kernels against their serial reference versions.

#include <benchmark/benchmark.h>

#include "pgl/analytics.hpp"
#include "pgl/counter.hpp"
#include "pgl/reference.hpp"

namespace {

const pgl::BiasSchedule kSchedule = pgl::BiasSchedule::log_power(1.0);

std::uint64_t windows(unsigned k) { return (std::uint64_t{1} << k) + k - 1; }

void BM_Sample(benchmark::State& state) {
  const auto k = static_cast<unsigned>(state.range(0));
  for (auto _ : state) benchmark::DoNotOptimize(pgl::sample_sequence(kSchedule, windows(k), 1));
  state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(windows(k)));
}

void BM_SampleReference(benchmark::State& state) {
  const auto k = static_cast<unsigned>(state.range(0));
  for (auto _ : state) benchmark::DoNotOptimize(pgl::reference::sample_sequence(kSchedule, windows(k), 1));
  state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(windows(k)));
}

void BM_Histogram(benchmark::State& state) {
  const auto k = static_cast<unsigned>(state.range(0));
  const auto x = pgl::sample_sequence(kSchedule, windows(k), 2);
  for (auto _ : state) benchmark::DoNotOptimize(pgl::window_histogram(x, k));
  state.SetItemsProcessed(state.iterations() * (std::int64_t{1} << k));
}

void BM_HistogramReference(benchmark::State& state) {
  const auto k = static_cast<unsigned>(state.range(0));
  const auto x = pgl::sample_sequence(kSchedule, windows(k), 2);
  for (auto _ : state) benchmark::DoNotOptimize(pgl::reference::window_histogram(x, k));
  state.SetItemsProcessed(state.iterations() * (std::int64_t{1} << k));
}

void BM_MeanAbs(benchmark::State& state) {
  const auto k = static_cast<unsigned>(state.range(0));
  pgl::ChenSteinParams p;
  p.exact_cap = 26;
  for (auto _ : state) benchmark::DoNotOptimize(pgl::mean_abs_p_minus_one(kSchedule, 1000, k, p));
}

void BM_MeanAbsReference(benchmark::State& state) {
  const auto k = static_cast<unsigned>(state.range(0));
  for (auto _ : state) benchmark::DoNotOptimize(pgl::reference::mean_abs_p_minus_one(kSchedule, 1000, k));
}

void BM_UnionBound(benchmark::State& state) {
  const auto k = static_cast<unsigned>(state.range(0));
  const auto w = pgl::sample_word(k, 3);
  for (auto _ : state) benchmark::DoNotOptimize(pgl::union_bound_hit_prob(kSchedule, k, w));
}

void BM_UnionBoundReference(benchmark::State& state) {
  const auto k = static_cast<unsigned>(state.range(0));
  const auto w = pgl::sample_word(k, 3);
  for (auto _ : state) benchmark::DoNotOptimize(pgl::reference::union_bound_hit_prob(kSchedule, k, w));
}

}  // namespace

BENCHMARK(BM_Sample)->Arg(20)->Arg(24)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_SampleReference)->Arg(20)->Arg(24)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_Histogram)->Arg(16)->Arg(20)->Arg(24)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_HistogramReference)->Arg(16)->Arg(20)->Arg(24)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_MeanAbs)->Arg(16)->Arg(20)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_MeanAbsReference)->Arg(16)->Arg(20)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_UnionBound)->Arg(16)->Arg(20)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_UnionBoundReference)->Arg(16)->Arg(20)->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();
