// Copyright 2026 The tracegen Authors
// SPDX-License-Identifier: Apache-2.0

#include "tracegen/assemble.hpp"

#include <algorithm>
#include <cctype>
#include <unordered_map>
#include <unordered_set>

#include "tracegen/graph.hpp"
#include "tracegen/hash.hpp"

namespace tracegen {
namespace {

std::string upper(std::string s) {
  std::transform(s.begin(), s.end(), s.begin(), [](unsigned char c) { return std::toupper(c); });
  return s;
}

}  // namespace

std::size_t RejectSummary::rejected_graphs() const {
  std::size_t n = 0;
  for (const auto& [_, count] : graphs_by_reason) n += count;
  return n;
}

AssembleResult assemble_graphs(std::span<const RawEdgeRecord> records, const AssembleOptions& options) {
  AssembleResult result;
  std::unordered_map<std::string, std::size_t> slot;
  std::vector<std::vector<const RawEdgeRecord*>> groups;
  for (const auto& r : records) {
    auto [it, inserted] = slot.emplace(r.trace_id, groups.size());
    if (inserted) groups.emplace_back();
    groups[it->second].push_back(&r);
  }

  for (const auto& group : groups) {
    std::vector<EdgeRecord> edges;
    std::optional<NodeId> service;
    edges.reserve(group.size());
    for (const RawEdgeRecord* r : group) {
      if (r->service_id && (!service || EdgeId::try_parse(r->rpc_id).value_or(EdgeId()).is_root()))
        service = r->service_id;
      if (!r->upstream || !r->downstream || !r->rpc_type) {
        ++result.rejects.dropped_records;
        continue;
      }
      EdgeRecord e;
      e.trace_id = r->trace_id;
      e.edge_id = r->rpc_id;
      e.source = options.root_aliases.count(r->upstream->str()) ? NodeId::client() : *r->upstream;
      e.destination = *r->downstream;
      e.comm_type = upper(*r->rpc_type);
      e.start_ms = r->timestamp_ms;
      if (r->timestamp_ms && r->response_time_ms) e.finish_ms = *r->timestamp_ms + *r->response_time_ms;
      edges.push_back(std::move(e));
    }
    try {
      if (!service) throw GraphError(GraphError::Kind::kMissingField, "trace has no service id");
      result.graphs.push_back(canonicalize_edge_ids(build_graph(edges, *service)));
    } catch (const GraphError& err) {
      ++result.rejects.graphs_by_reason[std::string(to_string(err.kind()))];
    }
  }
  return result;
}

std::vector<CallGraph> deduplicate(std::span<const CallGraph> graphs) {
  std::unordered_set<Digest> seen;
  std::vector<CallGraph> out;
  for (const auto& g : graphs)
    if (seen.insert(canonical_hash(g)).second) out.push_back(g);
  return out;
}

}  // namespace tracegen
