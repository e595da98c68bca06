// Copyright 2026 The tracegen Authors
// SPDX-License-Identifier: Apache-2.0

#include "tracegen/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <map>

#include "tracegen/rng.hpp"

namespace tracegen {

Counts<CallTriple> count_calls(std::span<const CallGraph> graphs) {
  Counts<CallTriple> out;
  for (const auto& g : graphs)
    for (const auto& e : g.edges) ++out[{e.source, e.destination, e.comm_type}];
  return out;
}

CallDistribution popular_call_distribution(const Counts<CallTriple>& counts, std::size_t top_n) {
  if (counts.empty()) throw EmptyCorpusError("no calls to rank");
  std::vector<std::pair<CallTriple, std::uint64_t>> ranked(counts.begin(), counts.end());
  // Map order already sorts triples ascending, so a stable sort keeps ties in that order.
  std::stable_sort(ranked.begin(), ranked.end(), [](const auto& a, const auto& b) { return a.second > b.second; });
  if (ranked.size() > top_n) ranked.resize(top_n);
  double total = 0;
  for (const auto& [_, n] : ranked) total += static_cast<double>(n);
  CallDistribution d;
  for (const auto& [t, n] : ranked) {
    d.support.push_back(t);
    d.probs.push_back(static_cast<double>(n) / total);
  }
  return d;
}

CallDistribution popular_call_distribution(std::span<const CallGraph> graphs, std::size_t top_n) {
  if (graphs.empty()) throw EmptyCorpusError("popular calls of an empty corpus");
  return popular_call_distribution(count_calls(graphs), top_n);
}

double kl_divergence(const CallDistribution& p, const Counts<CallTriple>& q_counts, const KlOptions& options) {
  std::vector<double> q(p.support.size(), 0.0);
  double q_total = 0;
  for (std::size_t i = 0; i < p.support.size(); ++i) {
    auto it = q_counts.find(p.support[i]);
    q[i] = it == q_counts.end() ? 0.0 : static_cast<double>(it->second);
    q_total += q[i];
  }
  double floored_total = 0;
  for (double& v : q) {
    v = q_total > 0 ? v / q_total : 0.0;
    v = std::max(v, options.eps);
    floored_total += v;
  }
  double kl = 0;
  for (std::size_t i = 0; i < q.size(); ++i) {
    if (p.probs[i] <= 0) continue;
    kl += p.probs[i] * std::log(p.probs[i] / (q[i] / floored_total));
  }
  if (options.log2) kl /= std::log(2.0);
  return std::max(kl, 0.0);
}

double kl_popular_calls(std::span<const CallGraph> real, std::span<const CallGraph> synthetic,
                        const KlOptions& options) {
  if (real.empty() || synthetic.empty()) throw EmptyCorpusError("KL needs two non-empty corpora");
  return kl_divergence(popular_call_distribution(real, options.top_n), count_calls(synthetic), options);
}

std::vector<NodeId> top_k_destinations(std::span<const CallGraph> graphs, std::size_t k) {
  std::map<NodeId, std::uint64_t> counts;
  for (const auto& g : graphs)
    for (const auto& e : g.edges) ++counts[e.destination];
  if (counts.size() < k)
    throw InsufficientSupport("need " + std::to_string(k) + " distinct microservices, corpus has " +
                              std::to_string(counts.size()));
  std::vector<std::pair<NodeId, std::uint64_t>> ranked(counts.begin(), counts.end());
  std::stable_sort(ranked.begin(), ranked.end(), [](const auto& a, const auto& b) { return a.second > b.second; });
  std::vector<NodeId> out;
  for (std::size_t i = 0; i < k; ++i) out.push_back(ranked[i].first);
  return out;
}

double heavy_hitter_similarity(std::span<const CallGraph> real, std::span<const CallGraph> synthetic, std::size_t k) {
  if (k == 0) throw std::invalid_argument("K must be positive");
  auto a = top_k_destinations(real, k);
  auto b = top_k_destinations(synthetic, k);
  std::sort(a.begin(), a.end());
  std::sort(b.begin(), b.end());
  std::vector<NodeId> common;
  std::set_intersection(a.begin(), a.end(), b.begin(), b.end(), std::back_inserter(common));
  return static_cast<double>(common.size()) / static_cast<double>(k);
}

RunSummary summarize_runs(std::vector<double> values) {
  RunSummary s;
  s.values = std::move(values);
  if (s.values.empty()) return s;
  double n = static_cast<double>(s.values.size());
  for (double v : s.values) s.mean += v;
  s.mean /= n;
  if (s.values.size() > 1) {
    double ss = 0;
    for (double v : s.values) ss += (v - s.mean) * (v - s.mean);
    s.stderr_ = std::sqrt(ss / (n - 1)) / std::sqrt(n);
  }
  return s;
}

RunSummary heavy_hitter_runs(std::span<const CallGraph> real,
                             const std::function<std::vector<CallGraph>(std::uint64_t)>& synth, std::size_t k,
                             std::size_t runs, std::uint64_t seed) {
  std::vector<double> values;
  for (std::size_t i = 0; i < runs; ++i) {
    auto syn = synth(derive_seed(seed, i));
    values.push_back(heavy_hitter_similarity(real, syn, k));
  }
  return summarize_runs(std::move(values));
}

double emd_normalized(std::span<const double> a, std::span<const double> b) {
  if (a.empty() || b.empty()) throw EmptySamples("EMD needs two non-empty sample sets");
  std::vector<double> x(a.begin(), a.end());
  std::vector<double> y(b.begin(), b.end());
  std::sort(x.begin(), x.end());
  std::sort(y.begin(), y.end());
  double lo = std::min(x.front(), y.front());
  double hi = std::max(x.back(), y.back());
  if (hi - lo <= 0) return 0.0;

  // Integrate |Fx - Fy| over the merged breakpoints.
  std::size_t i = 0;
  std::size_t j = 0;
  double area = 0;
  double prev = lo;
  const double nx = static_cast<double>(x.size());
  const double ny = static_cast<double>(y.size());
  while (i < x.size() || j < y.size()) {
    double cur = j >= y.size() || (i < x.size() && x[i] <= y[j]) ? x[i] : y[j];
    area += std::abs(static_cast<double>(i) / nx - static_cast<double>(j) / ny) * (cur - prev);
    while (i < x.size() && x[i] == cur) ++i;
    while (j < y.size() && y[j] == cur) ++j;
    prev = cur;
  }
  return std::clamp(area / (hi - lo), 0.0, 1.0);
}

DegreeSamples degree_distributions(std::span<const CallGraph> graphs) {
  if (graphs.empty()) throw EmptyCorpusError("degree distributions of an empty corpus");
  std::map<NodeId, std::uint64_t> in;
  std::map<NodeId, std::uint64_t> out;
  for (const auto& g : graphs)
    for (const auto& e : g.edges) {
      ++in[e.destination];
      if (e.source != NodeId::client()) ++out[e.source];
    }
  DegreeSamples d;
  for (const auto& [_, n] : in) d.in_degree.push_back(static_cast<double>(n));
  for (const auto& [_, n] : out) d.out_degree.push_back(static_cast<double>(n));
  return d;
}

std::vector<double> response_time_samples(std::span<const CallGraph> graphs) {
  std::vector<double> out;
  for (const auto& g : graphs)
    for (const auto& e : g.edges) out.push_back(static_cast<double>(e.duration_ms()));
  return out;
}

std::vector<double> child_count_samples(std::span<const CallGraph> graphs) {
  std::vector<double> out;
  for (const auto& g : graphs) {
    std::map<EdgeId, std::uint64_t> kids;
    for (const auto& e : g.edges) {
      kids.try_emplace(e.edge_id, 0);
      if (!e.edge_id.is_root()) ++kids[e.edge_id.parent()];
    }
    for (const auto& [_, n] : kids) out.push_back(static_cast<double>(n));
  }
  return out;
}

std::unordered_set<Digest> training_hashes(std::span<const CallGraph> graphs) {
  std::unordered_set<Digest> out;
  out.reserve(graphs.size());
  for (const auto& g : graphs) out.insert(canonical_hash(g));
  return out;
}

double memorization_rate(std::span<const CallGraph> synthetic, const std::unordered_set<Digest>& hashes) {
  if (synthetic.empty()) return 0.0;
  std::size_t hits = 0;
  for (const auto& g : synthetic) hits += hashes.count(canonical_hash(g));
  return static_cast<double>(hits) / static_cast<double>(synthetic.size());
}

Evaluation evaluate(std::span<const CallGraph> real, std::span<const CallGraph> synthetic,
                    const EvaluationOptions& options) {
  Evaluation ev;
  ev.kl_popular_calls = kl_popular_calls(real, synthetic, options.kl);
  for (std::size_t k : options.heavy_hitter_k) {
    try {
      ev.heavy_hitter.emplace_back(k, heavy_hitter_similarity(real, synthetic, k));
    } catch (const InsufficientSupport&) {
    }
  }
  auto rt_real = response_time_samples(real);
  auto rt_syn = response_time_samples(synthetic);
  ev.emd_response_time = emd_normalized(rt_real, rt_syn);
  auto d_real = degree_distributions(real);
  auto d_syn = degree_distributions(synthetic);
  ev.emd_in_degree = emd_normalized(d_real.in_degree, d_syn.in_degree);
  if (!d_real.out_degree.empty() && !d_syn.out_degree.empty())
    ev.emd_out_degree = emd_normalized(d_real.out_degree, d_syn.out_degree);
  ev.memorization_rate = memorization_rate(synthetic, training_hashes(real));
  return ev;
}

}  // namespace tracegen
