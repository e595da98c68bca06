// Copyright 2026 The tracegen Authors
// SPDX-License-Identifier: Apache-2.0

#include "tracegen/stats.hpp"

#include <algorithm>
#include <stdexcept>

#include "tracegen/graph.hpp"

namespace tracegen {

std::uint64_t CorpusStats::service_edges(const NodeId& service) const {
  auto it = per_service_call_freq.find(service);
  if (it == per_service_call_freq.end()) return 0;
  std::uint64_t n = 0;
  for (const auto& [_, c] : it->second) n += c;
  return n;
}

bool CorpusStats::is_uncommon(const NodeId& service, const CallTriple& call) const {
  auto it = per_service_call_freq.find(service);
  if (it == per_service_call_freq.end()) return false;
  auto c = it->second.find(call);
  if (c == it->second.end()) return false;
  return 10 * c->second < service_edges(service);
}

std::int64_t nearest_rank_percentile(std::vector<std::int64_t> values, int percent) {
  if (values.empty()) throw std::invalid_argument("percentile of an empty list");
  std::sort(values.begin(), values.end());
  std::size_t n = values.size();
  std::size_t rank = (static_cast<std::size_t>(percent) * n + 99) / 100;  // ceil(p*n/100)
  rank = std::clamp<std::size_t>(rank, 1, n);
  return values[rank - 1];
}

void StatsAccumulator::add(const CallGraph& g) {
  CorpusStats& s = partial_;
  ++s.total_graphs;
  s.total_edges += g.edges.size();
  ++s.graphs_per_service[g.service_id];
  latencies_[g.service_id].push_back(attributes(g).latency_ms);

  std::map<EdgeId, std::int64_t> children;
  for (const auto& e : g.edges)
    if (!e.edge_id.is_root()) ++children[e.edge_id.parent()];

  auto& service_calls = s.per_service_call_freq[g.service_id];
  for (const auto& e : g.edges) {
    CallTriple t{e.source, e.destination, e.comm_type};
    ++s.call_freq[t];
    ++service_calls[t];
    auto level = static_cast<std::int64_t>(e.edge_id.depth());
    auto kids = children.find(e.edge_id);
    ++s.child_count_dist[level][kids == children.end() ? 0 : kids->second];
    ++s.comm_type_dist[e.comm_type];
    ++s.comm_type_by_level[level][e.comm_type];
    ++s.response_time_dist[e.comm_type][e.duration_ms()];
    ++s.destination_freq[{e.source, e.comm_type}][e.destination];
  }
}

void StatsAccumulator::merge(const StatsAccumulator& other) {
  CorpusStats& s = partial_;
  const CorpusStats& o = other.partial_;
  s.total_graphs += o.total_graphs;
  s.total_edges += o.total_edges;
  add_counts(s.call_freq, o.call_freq);
  add_counts(s.graphs_per_service, o.graphs_per_service);
  for (const auto& [k, v] : o.per_service_call_freq) add_counts(s.per_service_call_freq[k], v);
  for (const auto& [k, v] : o.child_count_dist) add_counts(s.child_count_dist[k], v);
  add_counts(s.comm_type_dist, o.comm_type_dist);
  for (const auto& [k, v] : o.comm_type_by_level) add_counts(s.comm_type_by_level[k], v);
  for (const auto& [k, v] : o.response_time_dist) add_counts(s.response_time_dist[k], v);
  for (const auto& [k, v] : o.destination_freq) add_counts(s.destination_freq[k], v);
  for (const auto& [k, v] : other.latencies_) {
    auto& dst = latencies_[k];
    dst.insert(dst.end(), v.begin(), v.end());
  }
}

CorpusStats StatsAccumulator::finalize() const {
  if (partial_.total_graphs == 0) throw EmptyCorpusError("cannot compute statistics of an empty corpus");
  CorpusStats s = partial_;
  for (const auto& [service, values] : latencies_) s.per_service_p90_latency[service] = nearest_rank_percentile(values, 90);
  return s;
}

CorpusStats compute_stats(std::span<const CallGraph> graphs) {
  StatsAccumulator acc;
  for (const auto& g : graphs) acc.add(g);
  return acc.finalize();
}

}  // namespace tracegen
