// Copyright 2026 The tracegen Authors
// SPDX-License-Identifier: Apache-2.0

#include "tracegen/accuracy_grid.hpp"

#include <cstdio>
#include <mutex>

#include "tracegen/parallel.hpp"
#include "tracegen/rng.hpp"
#include "tracegen/statistical_backend.hpp"

namespace tracegen {

const GridCell* AccuracyGrid::find(std::int64_t num_edges, std::int64_t depth) const {
  for (const auto& c : cells)
    if (c.num_edges == num_edges && c.depth == depth) return &c;
  return nullptr;
}

PromptFactory fixed_prompt_factory(NodeId service, std::int64_t latency_ms) {
  return [service = std::move(service), latency_ms](std::int64_t n, std::int64_t d, std::size_t) {
    LayerConditions c;
    c.start_node = NodeId::client();
    c.caller = NodeId::none();
    c.remaining_depth = d;
    c.num_edges = n;
    c.start_edge_id = 0;
    c.latency_ms = latency_ms;
    c.start_communication_at_ms = 0;
    c.service_id = service;
    return std::optional<LayerConditions>(c);
  };
}

AccuracyGrid accuracy_grid(const BackendFactory& backends, const PromptFactory& prompts, const GridOptions& options) {
  AccuracyGrid grid;
  grid.samples_per_cell = options.samples_per_cell;
  grid.seed = options.seed;
  for (std::int64_t d = options.min_depth; d <= options.max_depth; ++d)
    for (std::int64_t n = options.min_edges; n <= options.max_edges; ++n) {
      GridCell cell;
      cell.num_edges = n;
      cell.depth = d;
      cell.samples = options.samples_per_cell;
      cell.satisfiable = graph_shape_satisfiable(n, d);
      grid.cells.push_back(cell);
    }

  const std::size_t per = options.samples_per_cell;
  std::vector<std::mutex> locks(grid.cells.size());
  parallel_for(grid.cells.size() * per, options.jobs, [&](std::size_t job) {
    std::size_t ci = job / per;
    std::size_t sample = job % per;
    GridCell& cell = grid.cells[ci];
    std::string note;
    bool valid = false;
    auto prompt = prompts(cell.num_edges, cell.depth, sample);
    if (!prompt) {
      note = "no_prompt";
    } else {
      CompletionParams params = options.params;
      params.seed = derive_seed(options.seed, ci, sample);
      try {
        auto backend = backends(*prompt, cell.num_edges, cell.depth, sample);
        auto result = recursive_generate(*backend, *prompt, params, options.limits);
        valid = result.ok();
        if (!valid) note = std::string(to_string(*result.session.failure));
      } catch (const UnparsablePrompt&) {
        note = "UnparsablePrompt";
      } catch (const BackendTimeout&) {
        note = "Timeout";
      } catch (const EmptyCompletion&) {
        note = "EmptyCompletion";
      } catch (const BackendError&) {
        note = "BackendUnavailable";
      }
    }
    std::lock_guard lock(locks[ci]);
    if (valid) ++cell.valid;
    if (!note.empty()) ++cell.annotations[note];
  });

  for (auto& c : grid.cells)
    c.fraction = c.samples == 0 ? 0.0 : static_cast<double>(c.valid) / static_cast<double>(c.samples);
  return grid;
}

Json to_json(const AccuracyGrid& grid) {
  Json cells = Json::array();
  for (const auto& c : grid.cells) {
    Json notes = Json::object();
    for (const auto& [k, v] : c.annotations) notes[k] = v;
    cells.push_back(Json{{"num_edges", c.num_edges},
                         {"depth", c.depth},
                         {"samples", c.samples},
                         {"valid", c.valid},
                         {"fraction", c.fraction},
                         {"satisfiable", c.satisfiable},
                         {"annotations", std::move(notes)}});
  }
  return Json{{"samples_per_cell", grid.samples_per_cell}, {"seed", grid.seed}, {"cells", std::move(cells)}};
}

std::string grid_csv(const AccuracyGrid& grid) {
  std::map<std::int64_t, std::map<std::int64_t, double>> rows;
  std::map<std::int64_t, bool> columns;
  for (const auto& c : grid.cells) {
    rows[c.depth][c.num_edges] = c.fraction;
    columns[c.num_edges] = true;
  }
  std::string out = "depth";
  for (const auto& [n, _] : columns) out += "," + std::to_string(n);
  out += '\n';
  char buf[32];
  for (const auto& [d, row] : rows) {
    out += std::to_string(d);
    for (const auto& [n, _] : columns) {
      auto it = row.find(n);
      if (it == row.end()) {
        out += ',';
        continue;
      }
      std::snprintf(buf, sizeof buf, ",%.4f", it->second);
      out += buf;
    }
    out += '\n';
  }
  return out;
}

}  // namespace tracegen
