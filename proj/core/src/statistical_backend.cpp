// Copyright 2026 The tracegen Authors
// SPDX-License-Identifier: Apache-2.0

#include "tracegen/statistical_backend.hpp"

#include "tracegen/codec.hpp"

namespace tracegen {

bool graph_shape_satisfiable(std::int64_t num_edges, std::int64_t depth) noexcept {
  // A single root edge: depth 1 admits exactly one edge.
  return depth >= 1 && num_edges >= depth && (depth > 1 || num_edges == 1);
}

Layer StatisticalBackend::sample_layer(const LayerConditions& c, const CompletionParams& params,
                                       std::uint64_t seed) const {
  const std::int64_t n = c.num_edges;
  const std::int64_t depth = c.remaining_depth;
  const bool root = c.caller == NodeId::none() && c.start_edge_id == 0;
  if (depth < 1 || n < depth) throw UnparsablePrompt("cannot fit depth " + std::to_string(depth) + " into " +
                                                     std::to_string(n) + " edges");
  if (root && !graph_shape_satisfiable(n, depth))
    throw UnparsablePrompt("a graph of depth 1 has exactly one edge");
  if (c.latency_ms < c.start_communication_at_ms) throw UnparsablePrompt("latency ends before the start time");

  Rng rng(seed);
  std::int64_t m = 1;
  if (!root) {
    if (depth == 1) {
      m = n;
    } else {
      std::int64_t max_m = n - (depth - 1);
      m = model_.fanout.empty() ? 1 : model_.fanout.sample(rng, params);
      m = std::clamp<std::int64_t>(m, 1, max_m);
    }
  }

  Layer layer;
  layer.conditions = c;
  for (std::int64_t k = 0; k < m; ++k) {
    std::string type = model_.comm_type.empty() ? std::string("RPC") : model_.comm_type.sample(rng, params);
    NodeId dest = model_.sample_destination(c.start_node, type, rng, &params);
    std::int64_t start = c.start_communication_at_ms;
    std::int64_t finish = c.latency_ms;
    if (!root) {
      std::int64_t window = c.latency_ms - c.start_communication_at_ms;
      std::int64_t d = model_.sample_duration(type, rng, &params);
      for (int retry = 0; retry < 8 && d > window; ++retry) d = model_.sample_duration(type, rng);
      d = std::clamp<std::int64_t>(d, 0, window);
      start = rng.uniform_int(c.start_communication_at_ms, c.latency_ms - d);
      finish = start + d;
    }
    layer.edges.push_back({c.start_edge_id + k, std::move(dest), std::move(type), start, finish});
  }
  if (depth < 2) return layer;

  // Block 0 carries the full remaining depth; the others share what is left.
  const std::int64_t rest = n - m;
  std::int64_t max_blocks = std::min<std::int64_t>(m, 1 + rest - (depth - 1));
  std::int64_t blocks = root ? 1 : rng.uniform_int(1, max_blocks);
  std::vector<std::int64_t> sizes(static_cast<std::size_t>(blocks), 1);
  sizes[0] = depth - 1;
  for (std::int64_t left = rest - (depth - 1) - (blocks - 1); left > 0; --left)
    ++sizes[static_cast<std::size_t>(rng.uniform_int(0, blocks - 1))];
  std::vector<std::int64_t> depths(sizes.size());
  depths[0] = depth - 1;
  for (std::size_t b = 1; b < sizes.size(); ++b) depths[b] = rng.uniform_int(1, std::min(depth - 1, sizes[b]));

  std::vector<std::size_t> order(sizes.size());
  for (std::size_t b = 0; b < order.size(); ++b) order[b] = b;
  rng.shuffle(order.begin(), order.end());
  std::vector<std::size_t> parents(static_cast<std::size_t>(m));
  for (std::size_t k = 0; k < parents.size(); ++k) parents[k] = k;
  rng.shuffle(parents.begin(), parents.end());
  parents.resize(sizes.size());
  std::sort(parents.begin(), parents.end());

  std::int64_t next = c.start_edge_id + m;
  for (std::size_t b = 0; b < parents.size(); ++b) {
    const LayerEdge& e = layer.edges[parents[b]];
    std::size_t block = order[b];
    LayerConditions child;
    child.start_node = e.destination;
    child.caller = c.start_node;
    child.remaining_depth = depths[block];
    child.num_edges = sizes[block];
    child.start_edge_id = next;
    child.latency_ms = e.finish_ms;
    child.start_communication_at_ms = e.start_ms;
    child.service_id = c.service_id;
    next += child.num_edges;
    layer.children.push_back({e.flat_edge_id, std::move(child)});
  }
  return layer;
}

std::string StatisticalBackend::complete(std::string_view prompt, const CompletionParams& params) {
  LayerConditions conds;
  try {
    conds = parse_conditions(prompt);
  } catch (const ParseError& e) {
    throw UnparsablePrompt(std::string("statistical backend: ") + e.what());
  }
  Layer l = sample_layer(conds, params, derive_seed(params.seed, fnv1a(prompt)));
  return render_layer_completion(l.conditions, l.edges, l.children, with_intermediate_);
}

}  // namespace tracegen
