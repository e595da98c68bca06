// Copyright 2026 The tracegen Authors
// SPDX-License-Identifier: Apache-2.0

#include "tracegen/graph.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <tuple>

namespace tracegen {

std::string_view to_string(GraphError::Kind kind) noexcept {
  switch (kind) {
    case GraphError::Kind::kMissingField: return "MissingField";
    case GraphError::Kind::kMalformedEdgeId: return "MalformedEdgeId";
    case GraphError::Kind::kMixedTraces: return "MixedTraces";
    case GraphError::Kind::kDisconnected: return "Disconnected";
    case GraphError::Kind::kDuplicateEdgeId: return "DuplicateEdgeId";
    case GraphError::Kind::kSourceMismatch: return "SourceMismatch";
    case GraphError::Kind::kInvalidInterval: return "InvalidInterval";
    case GraphError::Kind::kTimeNestingViolation: return "TimeNestingViolation";
    case GraphError::Kind::kMultipleRoots: return "MultipleRoots";
  }
  return "Unknown";
}

std::int64_t round_half_up(double ms) { return static_cast<std::int64_t>(std::floor(ms + 0.5)); }

CallGraph build_graph(std::span<const EdgeRecord> records, const NodeId& service_id) {
  using Kind = GraphError::Kind;
  if (records.empty()) throw GraphError(Kind::kMultipleRoots, "no records, so no root edge");

  CallGraph g;
  g.trace_id = records.front().trace_id;
  g.service_id = service_id;
  g.edges.reserve(records.size());
  for (const auto& r : records) {
    if (r.trace_id != g.trace_id)
      throw GraphError(Kind::kMixedTraces, "records span traces '" + g.trace_id + "' and '" + r.trace_id + "'");
    if (!r.source || !r.destination || !r.comm_type || !r.start_ms || !r.finish_ms || r.source->empty() ||
        r.destination->empty() || r.comm_type->empty())
      throw GraphError(Kind::kMissingField, "edge '" + r.edge_id + "' lacks a required field");
    auto id = EdgeId::try_parse(r.edge_id);
    if (!id) throw GraphError(Kind::kMalformedEdgeId, "bad edge id '" + r.edge_id + "'");
    g.edges.push_back(Edge{*id, *r.source, *r.destination, *r.comm_type, round_half_up(*r.start_ms),
                           round_half_up(*r.finish_ms)});
  }
  std::stable_sort(g.edges.begin(), g.edges.end(),
                   [](const Edge& a, const Edge& b) { return a.edge_id < b.edge_id; });

  std::size_t roots = std::count_if(g.edges.begin(), g.edges.end(), [](const Edge& e) { return e.edge_id.is_root(); });
  if (roots == 1) {
    std::int64_t offset = root_edge(g).start_ms;
    for (auto& e : g.edges) {
      e.start_ms -= offset;
      e.finish_ms -= offset;
    }
  }

  ValidationReport report = check_structure(g);
  if (report.empty()) return g;

  // Report the most fundamental failure first.
  static constexpr std::pair<ViolationCode, Kind> kPriority[] = {
      {ViolationCode::kGRoot, Kind::kMultipleRoots},
      {ViolationCode::kGDupId, Kind::kDuplicateEdgeId},
      {ViolationCode::kGParentLink, Kind::kDisconnected},
      {ViolationCode::kGSourceMatch, Kind::kSourceMismatch},
      {ViolationCode::kGEdgeTime, Kind::kInvalidInterval},
      {ViolationCode::kGTimeNest, Kind::kTimeNestingViolation},
  };
  for (const auto& [code, kind] : kPriority) {
    for (const auto& v : report)
      if (v.code == code) throw GraphError(kind, v.detail);
  }
  throw GraphError(Kind::kDisconnected, report.front().detail);
}

const Edge& root_edge(const CallGraph& g) {
  auto it = std::find_if(g.edges.begin(), g.edges.end(), [](const Edge& e) { return e.edge_id.is_root(); });
  if (it == g.edges.end()) throw std::logic_error("call graph has no root edge");
  return *it;
}

GraphAttributes attributes(const CallGraph& g) {
  GraphAttributes a;
  a.service_id = g.service_id;
  a.num_edges = static_cast<std::int64_t>(g.edges.size());
  for (const auto& e : g.edges) a.depth = std::max<std::int64_t>(a.depth, e.edge_id.depth());
  a.latency_ms = root_edge(g).duration_ms();
  return a;
}

ValidationReport check_structure(const CallGraph& g) {
  ValidationReport report;
  std::map<EdgeId, std::size_t> index;
  std::size_t roots = 0;

  for (std::size_t i = 0; i < g.edges.size(); ++i) {
    const Edge& e = g.edges[i];
    if (e.edge_id.depth() == 0) {
      report.push_back({ViolationCode::kGParentLink, "edge with empty id", i});
      continue;
    }
    if (!index.emplace(e.edge_id, i).second)
      report.push_back({ViolationCode::kGDupId, "duplicate edge id " + e.edge_id.str(), i});
    if (e.edge_id.is_root()) ++roots;
    if (e.start_ms > e.finish_ms || e.start_ms < 0)
      report.push_back({ViolationCode::kGEdgeTime,
                        "edge " + e.edge_id.str() + " has interval [" + std::to_string(e.start_ms) + ", " +
                            std::to_string(e.finish_ms) + "]",
                        i});
  }
  if (roots != 1)
    report.push_back({ViolationCode::kGRoot, "expected exactly one root edge, found " + std::to_string(roots),
                      std::nullopt});

  for (std::size_t i = 0; i < g.edges.size(); ++i) {
    const Edge& c = g.edges[i];
    if (c.edge_id.depth() <= 1) continue;
    auto it = index.find(c.edge_id.parent());
    if (it == index.end()) {
      report.push_back({ViolationCode::kGParentLink, "edge " + c.edge_id.str() + " has no parent edge", i});
      continue;
    }
    const Edge& p = g.edges[it->second];
    if (c.source != p.destination)
      report.push_back({ViolationCode::kGSourceMatch,
                        "edge " + c.edge_id.str() + " source " + c.source.str() + " != parent destination " +
                            p.destination.str(),
                        i});
    if (c.start_ms < p.start_ms || c.finish_ms > p.finish_ms)
      report.push_back({ViolationCode::kGTimeNest,
                        "edge " + c.edge_id.str() + " is not nested inside parent " + p.edge_id.str(), i});
  }
  return report;
}

bool sibling_before(const Edge& a, const Edge& b) {
  return std::tie(a.start_ms, a.destination, a.comm_type, a.finish_ms, a.edge_id) <
         std::tie(b.start_ms, b.destination, b.comm_type, b.finish_ms, b.edge_id);
}

CallGraph canonicalize_edge_ids(const CallGraph& g) {
  std::map<EdgeId, std::vector<std::size_t>> children;
  std::size_t root = g.edges.size();
  for (std::size_t i = 0; i < g.edges.size(); ++i) {
    const auto& id = g.edges[i].edge_id;
    if (id.is_root())
      root = i;
    else
      children[id.parent()].push_back(i);
  }
  if (root == g.edges.size()) throw std::logic_error("canonicalize_edge_ids: no root edge");

  CallGraph out{g.trace_id, g.service_id, {}};
  out.edges.reserve(g.edges.size());
  // (original index, new id)
  std::vector<std::pair<std::size_t, EdgeId>> stack{{root, EdgeId({0})}};
  while (!stack.empty()) {
    auto [i, id] = std::move(stack.back());
    stack.pop_back();
    Edge e = g.edges[i];
    auto it = children.find(e.edge_id);
    e.edge_id = id;
    out.edges.push_back(e);
    if (it == children.end()) continue;
    auto kids = it->second;
    std::sort(kids.begin(), kids.end(),
              [&](std::size_t a, std::size_t b) { return sibling_before(g.edges[a], g.edges[b]); });
    for (std::size_t k = kids.size(); k-- > 0;)
      stack.emplace_back(kids[k], id.child(static_cast<std::uint32_t>(k + 1)));
  }
  std::sort(out.edges.begin(), out.edges.end(), [](const Edge& a, const Edge& b) { return a.edge_id < b.edge_id; });
  return out;
}

}  // namespace tracegen
