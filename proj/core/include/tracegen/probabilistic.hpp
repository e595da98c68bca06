// Copyright 2026 The tracegen Authors
// SPDX-License-Identifier: Apache-2.0

// Statistical baseline: draws call graphs top-down from fitted corpus
// distributions.

#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <map>
#include <optional>
#include <utility>
#include <vector>

#include "tracegen/backend.hpp"
#include "tracegen/model.hpp"
#include "tracegen/rng.hpp"
#include "tracegen/stats.hpp"

namespace tracegen {

// A finite distribution with values in ascending key order.
template <typename T>
struct Discrete {
  std::vector<T> values;
  std::vector<double> probs;

  bool empty() const noexcept { return values.empty(); }

  static Discrete from_counts(const Counts<T>& counts) {
    Discrete d;
    std::uint64_t total = 0;
    for (const auto& [_, n] : counts) total += n;
    if (total == 0) return d;
    for (const auto& [v, n] : counts) {
      if (n == 0) continue;
      d.values.push_back(v);
      d.probs.push_back(static_cast<double>(n) / static_cast<double>(total));
    }
    return d;
  }

  const T& sample(Rng& rng) const { return values[rng.weighted(probs)]; }

  // Temperature 0 picks the most likely value (the smallest on ties); a
  // positive temperature reshapes the top_k most likely values by p^(1/T).
  const T& sample(Rng& rng, const CompletionParams& params) const;
};

struct ProbModel {
  // Edge level (root = 1) -> number of children of one edge.
  std::map<std::int64_t, Discrete<std::int64_t>> child_count;
  Discrete<std::string> comm_type;
  std::map<std::pair<NodeId, std::string>, Discrete<NodeId>> destination;
  std::map<std::string, Discrete<NodeId>> destination_by_type;
  std::map<std::string, Discrete<std::int64_t>> response_time;
  Discrete<NodeId> service;
  // Child counts of all edges pooled, restricted to counts >= 1.
  Discrete<std::int64_t> fanout;

  NodeId sample_destination(const NodeId& source, const std::string& type, Rng& rng,
                            const CompletionParams* params = nullptr) const;
  std::int64_t sample_duration(const std::string& type, Rng& rng, const CompletionParams* params = nullptr) const;
};

// Throws EmptyCorpusError when `stats` covers no graphs.
ProbModel fit_probabilistic(const CorpusStats& stats);

struct SampleLimits {
  std::int64_t max_depth = 64;
  std::size_t max_edges = 10000;
};

// Draws one graph. Per level: child count, then per child a comm type,
// destination and duration. Child intervals lie inside the parent's: the
// duration is redrawn up to 8 times while it does not fit, then clamped,
// and the start is uniform over the feasible window.
CallGraph sample_probabilistic(const ProbModel& model, const NodeId& root, std::uint64_t seed,
                               const SampleLimits& limits = {});

template <typename T>
const T& Discrete<T>::sample(Rng& rng, const CompletionParams& params) const {
  if (params.temperature <= 0) {
    std::size_t best = 0;
    for (std::size_t i = 1; i < probs.size(); ++i)
      if (probs[i] > probs[best]) best = i;
    return values[best];
  }
  std::vector<std::size_t> idx(values.size());
  for (std::size_t i = 0; i < idx.size(); ++i) idx[i] = i;
  if (params.top_k && *params.top_k > 0 && static_cast<std::size_t>(*params.top_k) < idx.size()) {
    std::stable_sort(idx.begin(), idx.end(), [&](std::size_t a, std::size_t b) { return probs[a] > probs[b]; });
    idx.resize(static_cast<std::size_t>(*params.top_k));
  }
  double top = 0;
  for (std::size_t i : idx) top = std::max(top, probs[i]);
  std::vector<double> w;
  w.reserve(idx.size());
  for (std::size_t i : idx) w.push_back(std::pow(probs[i] / top, 1.0 / params.temperature));
  return values[idx[rng.weighted(w)]];
}

}  // namespace tracegen
