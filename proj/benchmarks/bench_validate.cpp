// Copyright 2026 The tracegen Authors
// SPDX-License-Identifier: Apache-2.0

#include <benchmark/benchmark.h>

#include "fixture.hpp"
#include "tracegen/codec.hpp"
#include "tracegen/driver.hpp"
#include "tracegen/layers.hpp"
#include "tracegen/replay_backend.hpp"
#include "tracegen/validator.hpp"

namespace {

using tracegen::testing::fixture_graphs;

std::vector<tracegen::Layer> some_layers() {
  std::vector<tracegen::Layer> out;
  for (const auto& g : fixture_graphs()) {
    for (auto& l : tracegen::decompose_layers(g)) out.push_back(std::move(l));
    if (out.size() >= 5000) break;
  }
  return out;
}

void BM_ValidateLayer(benchmark::State& state) {
  auto layers = some_layers();
  std::size_t i = 0;
  for (auto _ : state) {
    const auto& l = layers[i++ % layers.size()];
    benchmark::DoNotOptimize(tracegen::validate_layer(l.edges, l.children, l.conditions));
  }
}
BENCHMARK(BM_ValidateLayer);

void BM_ValidateLayerText(benchmark::State& state) {
  auto layers = some_layers();
  std::vector<std::string> texts;
  for (const auto& l : layers) texts.push_back(tracegen::render_layer_completion(l.conditions, l.edges, l.children, true));
  std::size_t i = 0;
  for (auto _ : state) {
    std::size_t k = i++ % layers.size();
    benchmark::DoNotOptimize(tracegen::validate_layer_text(texts[k], layers[k].conditions));
  }
}
BENCHMARK(BM_ValidateLayerText);

void BM_ReplayGenerate(benchmark::State& state) {
  const auto& gs = fixture_graphs();
  std::vector<tracegen::ReplayBackend> backends;
  for (std::size_t i = 0; i < 500; ++i) backends.emplace_back(gs[i]);
  std::size_t i = 0;
  for (auto _ : state) {
    std::size_t k = i++ % backends.size();
    benchmark::DoNotOptimize(tracegen::recursive_generate(backends[k], tracegen::graph_prompt(gs[k]), {}));
  }
}
BENCHMARK(BM_ReplayGenerate);

}  // namespace
