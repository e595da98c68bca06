// Copyright 2026 The tracegen Authors
// SPDX-License-Identifier: Apache-2.0

#include "tracegen/probabilistic.hpp"

#include <deque>

#include "tracegen/graph.hpp"

namespace tracegen {

NodeId ProbModel::sample_destination(const NodeId& source, const std::string& type, Rng& rng,
                                     const CompletionParams* params) const {
  const Discrete<NodeId>* d = nullptr;
  auto it = destination.find({source, type});
  if (it != destination.end() && !it->second.empty()) {
    d = &it->second;
  } else {
    auto by_type = destination_by_type.find(type);
    if (by_type != destination_by_type.end() && !by_type->second.empty()) d = &by_type->second;
  }
  if (!d) return NodeId("UNKNOWN");
  return params ? d->sample(rng, *params) : d->sample(rng);
}

std::int64_t ProbModel::sample_duration(const std::string& type, Rng& rng, const CompletionParams* params) const {
  auto it = response_time.find(type);
  if (it == response_time.end() || it->second.empty()) return 0;
  return params ? it->second.sample(rng, *params) : it->second.sample(rng);
}

ProbModel fit_probabilistic(const CorpusStats& stats) {
  if (stats.total_graphs == 0) throw EmptyCorpusError("cannot fit a model to an empty corpus");
  ProbModel m;
  Counts<std::int64_t> fanout;
  for (const auto& [level, counts] : stats.child_count_dist) {
    m.child_count[level] = Discrete<std::int64_t>::from_counts(counts);
    for (const auto& [c, n] : counts)
      if (c > 0) fanout[c] += n;
  }
  m.fanout = Discrete<std::int64_t>::from_counts(fanout);
  m.comm_type = Discrete<std::string>::from_counts(stats.comm_type_dist);
  std::map<std::string, Counts<NodeId>> by_type;
  for (const auto& [key, counts] : stats.destination_freq) {
    m.destination[key] = Discrete<NodeId>::from_counts(counts);
    add_counts(by_type[key.second], counts);
  }
  for (const auto& [type, counts] : by_type) m.destination_by_type[type] = Discrete<NodeId>::from_counts(counts);
  for (const auto& [type, counts] : stats.response_time_dist)
    m.response_time[type] = Discrete<std::int64_t>::from_counts(counts);
  m.service = Discrete<NodeId>::from_counts(stats.graphs_per_service);
  return m;
}

CallGraph sample_probabilistic(const ProbModel& model, const NodeId& root, std::uint64_t seed,
                               const SampleLimits& limits) {
  Rng rng(seed);
  CallGraph g;
  g.trace_id = "sample-" + std::to_string(seed);
  g.service_id = model.service.empty() ? NodeId() : model.service.sample(rng);

  auto draw_type = [&] { return model.comm_type.empty() ? std::string("RPC") : model.comm_type.sample(rng); };

  std::string type = draw_type();
  std::int64_t duration = std::max<std::int64_t>(0, model.sample_duration(type, rng));
  g.edges.push_back(Edge{EdgeId({0}), root, model.sample_destination(root, type, rng), type, 0, duration});

  std::deque<std::size_t> queue{0};
  while (!queue.empty()) {
    std::size_t pi = queue.front();
    queue.pop_front();
    auto level = static_cast<std::int64_t>(g.edges[pi].edge_id.depth());
    if (level >= limits.max_depth) continue;
    auto dist = model.child_count.find(level);
    if (dist == model.child_count.end() || dist->second.empty()) continue;
    std::int64_t kids = dist->second.sample(rng);

    for (std::int64_t k = 1; k <= kids && g.edges.size() < limits.max_edges; ++k) {
      const Edge parent = g.edges[pi];
      std::string t = draw_type();
      std::int64_t window = parent.finish_ms - parent.start_ms;
      std::int64_t d = model.sample_duration(t, rng);
      for (int retry = 0; retry < 8 && d > window; ++retry) d = model.sample_duration(t, rng);
      d = std::clamp<std::int64_t>(d, 0, window);
      std::int64_t start = rng.uniform_int(parent.start_ms, parent.finish_ms - d);
      g.edges.push_back(Edge{parent.edge_id.child(static_cast<std::uint32_t>(k)), parent.destination,
                             model.sample_destination(parent.destination, t, rng), t, start, start + d});
      queue.push_back(g.edges.size() - 1);
    }
  }
  return canonicalize_edge_ids(g);
}

}  // namespace tracegen
