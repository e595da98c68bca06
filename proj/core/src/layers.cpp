// Copyright 2026 The tracegen Authors
// SPDX-License-Identifier: Apache-2.0

#include "tracegen/layers.hpp"

#include <algorithm>
#include <stdexcept>

#include "tracegen/graph.hpp"

namespace tracegen {
namespace {

struct Tree {
  std::map<EdgeId, std::vector<std::size_t>> children;
  std::vector<std::int64_t> descendants;  // edges strictly below
  std::vector<std::int64_t> height;       // layers strictly below
  std::size_t root = 0;
};

Tree index_tree(const CallGraph& g) {
  Tree t;
  t.descendants.assign(g.edges.size(), 0);
  t.height.assign(g.edges.size(), 0);
  std::vector<std::size_t> order(g.edges.size());
  for (std::size_t i = 0; i < g.edges.size(); ++i) {
    order[i] = i;
    const auto& id = g.edges[i].edge_id;
    if (id.is_root())
      t.root = i;
    else
      t.children[id.parent()].push_back(i);
  }
  for (auto& [_, kids] : t.children)
    std::sort(kids.begin(), kids.end(),
              [&](std::size_t a, std::size_t b) { return sibling_before(g.edges[a], g.edges[b]); });

  // Deepest first so children are finished before their parents.
  std::sort(order.begin(), order.end(),
            [&](std::size_t a, std::size_t b) { return g.edges[a].edge_id.depth() > g.edges[b].edge_id.depth(); });
  for (std::size_t i : order) {
    auto it = t.children.find(g.edges[i].edge_id);
    if (it == t.children.end()) continue;
    for (std::size_t c : it->second) {
      t.descendants[i] += 1 + t.descendants[c];
      t.height[i] = std::max(t.height[i], 1 + t.height[c]);
    }
  }
  return t;
}

void emit(const CallGraph& g, const Tree& t, const std::vector<std::size_t>& members, const LayerConditions& conds,
          std::vector<Layer>& out) {
  Layer layer;
  layer.conditions = conds;
  std::int64_t next = conds.start_edge_id + static_cast<std::int64_t>(members.size());
  std::vector<std::pair<std::size_t, LayerConditions>> pending;

  for (std::size_t k = 0; k < members.size(); ++k) {
    const Edge& e = g.edges[members[k]];
    std::int64_t flat = conds.start_edge_id + static_cast<std::int64_t>(k);
    layer.edges.push_back({flat, e.destination, e.comm_type, e.start_ms, e.finish_ms});
    if (t.descendants[members[k]] == 0) continue;
    LayerConditions child;
    child.start_node = e.destination;
    child.caller = conds.start_node;
    child.remaining_depth = t.height[members[k]];
    child.num_edges = t.descendants[members[k]];
    child.start_edge_id = next;
    child.latency_ms = e.finish_ms;
    child.start_communication_at_ms = e.start_ms;
    child.service_id = conds.service_id;
    next += child.num_edges;
    layer.children.push_back({flat, child});
    pending.emplace_back(members[k], child);
  }
  out.push_back(std::move(layer));
  for (const auto& [parent, child] : pending) emit(g, t, t.children.at(g.edges[parent].edge_id), child, out);
}

}  // namespace

LayerConditions graph_prompt(const CallGraph& g) {
  const Edge& root = root_edge(g);
  GraphAttributes a = attributes(g);
  LayerConditions c;
  c.start_node = root.source;
  c.caller = NodeId::none();
  c.remaining_depth = a.depth;
  c.num_edges = a.num_edges;
  c.start_edge_id = 0;
  c.latency_ms = a.latency_ms;
  c.start_communication_at_ms = root.start_ms;
  c.service_id = g.service_id;
  return c;
}

std::vector<Layer> decompose_layers(const CallGraph& g) {
  Tree t = index_tree(g);
  std::vector<Layer> out;
  emit(g, t, {t.root}, graph_prompt(g), out);
  return out;
}

GraphAssembler::GraphAssembler(std::string trace_id, NodeId service_id) {
  graph_.trace_id = std::move(trace_id);
  graph_.service_id = std::move(service_id);
}

std::vector<EdgeId> GraphAssembler::add_layer(const std::vector<std::uint32_t>& parent, const NodeId& source,
                                              std::span<const LayerEdge> edges) {
  std::vector<EdgeId> ids;
  ids.reserve(edges.size());
  for (std::size_t k = 0; k < edges.size(); ++k) {
    auto path = parent;
    path.push_back(static_cast<std::uint32_t>(parent.empty() ? k : k + 1));
    EdgeId id(std::move(path));
    const LayerEdge& le = edges[k];
    graph_.edges.push_back(Edge{id, source, le.destination, le.comm_type, le.start_ms, le.finish_ms});
    ids.push_back(std::move(id));
  }
  return ids;
}

CallGraph GraphAssembler::take() {
  std::sort(graph_.edges.begin(), graph_.edges.end(),
            [](const Edge& a, const Edge& b) { return a.edge_id < b.edge_id; });
  return std::move(graph_);
}

CallGraph assemble_layers(std::span<const Layer> layers, const std::string& trace_id, const NodeId& service_id) {
  if (layers.empty()) throw std::invalid_argument("assemble_layers: no layers");
  std::map<std::int64_t, std::size_t> by_start;
  for (std::size_t i = 1; i < layers.size(); ++i) {
    if (!by_start.emplace(layers[i].conditions.start_edge_id, i).second)
      throw std::invalid_argument("assemble_layers: two layers share start_edge_id " +
                                  std::to_string(layers[i].conditions.start_edge_id));
  }

  GraphAssembler assembler(trace_id, service_id);
  std::vector<bool> used(layers.size(), false);
  std::vector<std::pair<std::size_t, std::vector<std::uint32_t>>> work{{0, {}}};
  used[0] = true;
  while (!work.empty()) {
    auto [li, parent] = std::move(work.back());
    work.pop_back();
    const Layer& layer = layers[li];
    auto ids = assembler.add_layer(parent, layer.conditions.start_node, layer.edges);
    for (const auto& child : layer.children) {
      auto edge = std::find_if(layer.edges.begin(), layer.edges.end(),
                               [&](const LayerEdge& e) { return e.flat_edge_id == child.parent_edge_id; });
      if (edge == layer.edges.end())
        throw std::invalid_argument("assemble_layers: subgraph references unknown edge " +
                                    std::to_string(child.parent_edge_id));
      auto target = by_start.find(child.conditions.start_edge_id);
      if (target == by_start.end() || used[target->second])
        throw std::invalid_argument("assemble_layers: no layer starts at edge " +
                                    std::to_string(child.conditions.start_edge_id));
      used[target->second] = true;
      work.emplace_back(target->second, ids[edge - layer.edges.begin()].path());
    }
  }
  if (std::find(used.begin(), used.end(), false) != used.end())
    throw std::invalid_argument("assemble_layers: unreachable layer");
  return assembler.take();
}

}  // namespace tracegen
