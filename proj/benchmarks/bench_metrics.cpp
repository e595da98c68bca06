// Copyright 2026 The tracegen Authors
// SPDX-License-Identifier: Apache-2.0

#include <benchmark/benchmark.h>

#include "fixture.hpp"
#include "tracegen/metrics.hpp"
#include "tracegen/rng.hpp"

namespace {

using tracegen::testing::fixture_graphs;

void BM_EmdNormalized(benchmark::State& state) {
  const auto n = static_cast<std::size_t>(state.range(0));
  tracegen::Rng rng(1);
  std::vector<double> a(n), b(n);
  for (auto& x : a) x = rng.uniform01() * 1000;
  for (auto& x : b) x = rng.uniform01() * 900 + 50;
  for (auto _ : state) benchmark::DoNotOptimize(tracegen::emd_normalized(a, b));
  state.SetComplexityN(static_cast<std::int64_t>(n));
}
BENCHMARK(BM_EmdNormalized)->RangeMultiplier(8)->Range(64, 1 << 18)->Complexity();

void BM_KlPopularCalls(benchmark::State& state) {
  const auto& gs = fixture_graphs();
  std::span<const tracegen::CallGraph> a(gs.data(), gs.size() / 2), b(gs.data() + gs.size() / 2, gs.size() / 2);
  for (auto _ : state) benchmark::DoNotOptimize(tracegen::kl_popular_calls(a, b));
}
BENCHMARK(BM_KlPopularCalls)->Unit(benchmark::kMillisecond);

void BM_Evaluate(benchmark::State& state) {
  const auto& gs = fixture_graphs();
  std::span<const tracegen::CallGraph> a(gs.data(), gs.size() / 2), b(gs.data() + gs.size() / 2, gs.size() / 2);
  for (auto _ : state) benchmark::DoNotOptimize(tracegen::evaluate(a, b));
}
BENCHMARK(BM_Evaluate)->Unit(benchmark::kMillisecond);

}  // namespace
