// Copyright 2026 The tracegen Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <compare>
#include <cstdint>
#include <map>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "tracegen/model.hpp"

namespace tracegen {

// A (source, destination, communication type) call.
struct CallTriple {
  NodeId source;
  NodeId destination;
  std::string comm_type;

  friend bool operator==(const CallTriple&, const CallTriple&) = default;
  friend auto operator<=>(const CallTriple&, const CallTriple&) = default;
};

template <typename K>
using Counts = std::map<K, std::uint64_t>;

template <typename K>
std::map<K, double> normalize(const Counts<K>& counts) {
  std::uint64_t total = 0;
  for (const auto& [_, n] : counts) total += n;
  std::map<K, double> out;
  if (total == 0) return out;
  for (const auto& [k, n] : counts) out[k] = static_cast<double>(n) / static_cast<double>(total);
  return out;
}

template <typename K>
void add_counts(Counts<K>& into, const Counts<K>& from) {
  for (const auto& [k, n] : from) into[k] += n;
}

// Fitted statistics of a corpus. Distributions are kept as raw counts so
// shards merge exactly; normalize() turns any of them into probabilities.
struct CorpusStats {
  std::uint64_t total_graphs = 0;
  std::uint64_t total_edges = 0;
  Counts<CallTriple> call_freq;
  std::map<NodeId, std::int64_t> per_service_p90_latency;
  Counts<NodeId> graphs_per_service;
  std::map<NodeId, Counts<CallTriple>> per_service_call_freq;
  // Edge level (root = 1) -> number of children of edges at that level.
  std::map<std::int64_t, Counts<std::int64_t>> child_count_dist;
  Counts<std::string> comm_type_dist;
  std::map<std::int64_t, Counts<std::string>> comm_type_by_level;
  // Comm type -> edge duration in ms.
  std::map<std::string, Counts<std::int64_t>> response_time_dist;
  std::map<std::pair<NodeId, std::string>, Counts<NodeId>> destination_freq;

  std::uint64_t service_edges(const NodeId& service) const;
  // A call is uncommon when it makes up less than 10% of its service's edges.
  bool is_uncommon(const NodeId& service, const CallTriple& call) const;
};

// Nearest-rank percentile: the ceil(p/100 * n)-th smallest value.
std::int64_t nearest_rank_percentile(std::vector<std::int64_t> values, int percent);

class StatsAccumulator {
 public:
  void add(const CallGraph& g);
  void merge(const StatsAccumulator& other);
  // Throws EmptyCorpusError when nothing was added.
  CorpusStats finalize() const;

 private:
  CorpusStats partial_;
  std::map<NodeId, std::vector<std::int64_t>> latencies_;
};

CorpusStats compute_stats(std::span<const CallGraph> graphs);

}  // namespace tracegen
