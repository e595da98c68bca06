// Copyright 2026 The tracegen Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <functional>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "tracegen/backend.hpp"
#include "tracegen/driver.hpp"
#include "tracegen/graph_json.hpp"

namespace tracegen {

struct GridCell {
  std::int64_t num_edges = 0;
  std::int64_t depth = 0;
  std::size_t samples = 0;
  std::size_t valid = 0;
  double fraction = 0;
  // Some valid graph has this shape.
  bool satisfiable = false;
  // Backend errors and failure reasons, by name.
  std::map<std::string, std::size_t> annotations;
};

struct AccuracyGrid {
  std::vector<GridCell> cells;  // row-major: depth outer, num_edges inner
  std::size_t samples_per_cell = 0;
  std::uint64_t seed = 0;

  const GridCell* find(std::int64_t num_edges, std::int64_t depth) const;
};

struct GridOptions {
  std::int64_t min_edges = 1;
  std::int64_t max_edges = 30;
  std::int64_t min_depth = 1;
  std::int64_t max_depth = 6;
  std::size_t samples_per_cell = 50;
  CompletionParams params;
  GenerationLimits limits = [] {
    GenerationLimits l;
    l.max_retries = 0;
    return l;
  }();
  std::uint64_t seed = 0;
  unsigned jobs = 1;
};

// Builds the graph-level prompt for one session of a cell; returns nullopt
// when it has nothing to offer for that cell (the session then counts as a
// failure annotated "no_prompt").
using PromptFactory =
    std::function<std::optional<LayerConditions>(std::int64_t num_edges, std::int64_t depth, std::size_t sample)>;

// Returns the backend for one session. May return the same shared instance
// for every session when it is safe to call concurrently.
using BackendFactory = std::function<std::shared_ptr<Backend>(const LayerConditions& prompt, std::int64_t num_edges,
                                                               std::int64_t depth, std::size_t sample)>;

// A prompt with the given shape for service `service`, entry node Client,
// starting at 0 ms with the given latency.
PromptFactory fixed_prompt_factory(NodeId service, std::int64_t latency_ms);

AccuracyGrid accuracy_grid(const BackendFactory& backends, const PromptFactory& prompts, const GridOptions& options);

Json to_json(const AccuracyGrid& grid);
// num_edges columns, depth rows.
std::string grid_csv(const AccuracyGrid& grid);

}  // namespace tracegen
