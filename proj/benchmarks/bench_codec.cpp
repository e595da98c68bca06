// Copyright 2026 The tracegen Authors
// SPDX-License-Identifier: Apache-2.0

#include <benchmark/benchmark.h>

#include "fixture.hpp"
#include "tracegen/codec.hpp"
#include "tracegen/corpus.hpp"
#include "tracegen/layers.hpp"

namespace {

using tracegen::testing::fixture_graphs;

void BM_DecomposeLayers(benchmark::State& state) {
  const auto& gs = fixture_graphs();
  std::size_t i = 0, edges = 0;
  for (auto _ : state) {
    const auto& g = gs[i++ % gs.size()];
    benchmark::DoNotOptimize(tracegen::decompose_layers(g));
    edges += g.edges.size();
  }
  state.counters["edges/s"] = benchmark::Counter(double(edges), benchmark::Counter::kIsRate);
}
BENCHMARK(BM_DecomposeLayers);

void BM_EncodeTabular(benchmark::State& state) {
  const auto& gs = fixture_graphs();
  std::size_t i = 0;
  for (auto _ : state) {
    benchmark::DoNotOptimize(tracegen::encode_tabular_sample(gs[i % gs.size()], i));
    ++i;
  }
}
BENCHMARK(BM_EncodeTabular);

void BM_ParseTabular(benchmark::State& state) {
  const auto& gs = fixture_graphs();
  std::vector<std::string> texts;
  for (std::size_t i = 0; i < 1000; ++i) texts.push_back(tracegen::encode_tabular_sample(gs[i], i).text);
  std::size_t i = 0, bytes = 0;
  for (auto _ : state) {
    const auto& t = texts[i++ % texts.size()];
    benchmark::DoNotOptimize(tracegen::parse_tabular_sample(t));
    bytes += t.size();
  }
  state.SetBytesProcessed(static_cast<std::int64_t>(bytes));
}
BENCHMARK(BM_ParseTabular);

void BM_PretrainingRoundTrip(benchmark::State& state) {
  const auto& gs = fixture_graphs();
  std::size_t i = 0;
  for (auto _ : state) {
    auto s = tracegen::pretraining_sample(gs[i % gs.size()], 0.9, i);
    benchmark::DoNotOptimize(tracegen::reconstruct_pretraining_sample(s.text));
    ++i;
  }
}
BENCHMARK(BM_PretrainingRoundTrip);

}  // namespace
