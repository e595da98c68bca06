// Copyright 2026 The tracegen Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <map>
#include <span>
#include <string>
#include <vector>

#include "tracegen/model.hpp"

namespace tracegen {

// Graph-level prompt c^1: the root layer's conditions.
LayerConditions graph_prompt(const CallGraph& g);

// Splits a valid graph into layers (the children of one edge, or the root
// edge alone), in pre-order. Flat edge ids are assigned in the same order so
// each layer's subtree occupies [start_edge_id, start_edge_id + num_edges).
// Child conditions carry the parent edge's window: latency is the parent's
// finish time and the start time is the parent's start time.
std::vector<Layer> decompose_layers(const CallGraph& g);

// Rebuilds dot-decimal ids from flat layers. The k-th edge (0-based) of the
// root layer gets path "k"; the k-th edge of a layer attached under path P
// gets P.(k+1).
class GraphAssembler {
 public:
  GraphAssembler(std::string trace_id, NodeId service_id);

  // Adds one layer hanging off `parent` (empty for the root layer) and
  // returns the dot-decimal id assigned to each of its edges.
  std::vector<EdgeId> add_layer(const std::vector<std::uint32_t>& parent, const NodeId& source,
                                std::span<const LayerEdge> edges);

  const CallGraph& graph() const noexcept { return graph_; }
  CallGraph take();

 private:
  CallGraph graph_;
};

// Reconstructs a graph from a pre-ordered layer list as produced by
// decompose_layers. Child layers are matched to their subgraph blocks by
// start_edge_id. Throws std::invalid_argument on dangling references.
CallGraph assemble_layers(std::span<const Layer> layers, const std::string& trace_id, const NodeId& service_id);

}  // namespace tracegen
