// Copyright 2026 The tracegen Authors
// SPDX-License-Identifier: Apache-2.0

// Similarity metrics between a real and a synthetic corpus.

#pragma once

#include <cstdint>
#include <functional>
#include <span>
#include <stdexcept>
#include <unordered_set>
#include <vector>

#include "tracegen/hash.hpp"
#include "tracegen/model.hpp"
#include "tracegen/stats.hpp"

namespace tracegen {

class InsufficientSupport : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class EmptySamples : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

struct CallDistribution {
  std::vector<CallTriple> support;
  std::vector<double> probs;
};

// Counts every edge as a (source, destination, type) call.
Counts<CallTriple> count_calls(std::span<const CallGraph> graphs);

// The top_n most frequent calls (ties broken by ascending triple),
// renormalized. Throws EmptyCorpusError for an empty corpus.
CallDistribution popular_call_distribution(std::span<const CallGraph> graphs, std::size_t top_n);
CallDistribution popular_call_distribution(const Counts<CallTriple>& counts, std::size_t top_n);

struct KlOptions {
  std::size_t top_n = 100;
  double eps = 1e-6;
  bool log2 = false;  // natural log by default
};

// KL(P || Q) over P's support. Q is restricted to that support and
// renormalized, floored at eps, and renormalized again.
double kl_divergence(const CallDistribution& p, const Counts<CallTriple>& q_counts, const KlOptions& options = {});
double kl_popular_calls(std::span<const CallGraph> real, std::span<const CallGraph> synthetic,
                        const KlOptions& options = {});

// Destinations ranked by invocation count, descending, ties by name.
// Throws InsufficientSupport when fewer than k distinct destinations exist.
std::vector<NodeId> top_k_destinations(std::span<const CallGraph> graphs, std::size_t k);
// |topK(real) & topK(synthetic)| / K.
double heavy_hitter_similarity(std::span<const CallGraph> real, std::span<const CallGraph> synthetic, std::size_t k);

struct RunSummary {
  std::vector<double> values;
  double mean = 0;
  double stderr_ = 0;  // standard error of the mean
};

RunSummary summarize_runs(std::vector<double> values);

// Heavy-hitter similarity over `runs` synthetic corpora, corpus i drawn by
// synth(derive_seed(seed, i)).
RunSummary heavy_hitter_runs(std::span<const CallGraph> real,
                             const std::function<std::vector<CallGraph>(std::uint64_t)>& synth, std::size_t k,
                             std::size_t runs = 20, std::uint64_t seed = 0);

// 1-D earth mover's distance divided by the pooled range; 0 when the range
// is 0. Throws EmptySamples when either side is empty.
double emd_normalized(std::span<const double> a, std::span<const double> b);

struct DegreeSamples {
  std::vector<double> in_degree;   // calls received, per node with at least one
  std::vector<double> out_degree;  // calls made, per node with at least one; Client excluded
};

DegreeSamples degree_distributions(std::span<const CallGraph> graphs);
std::vector<double> response_time_samples(std::span<const CallGraph> graphs);
// Children per edge, leaves included.
std::vector<double> child_count_samples(std::span<const CallGraph> graphs);

std::unordered_set<Digest> training_hashes(std::span<const CallGraph> graphs);
double memorization_rate(std::span<const CallGraph> synthetic, const std::unordered_set<Digest>& hashes);

struct EvaluationOptions {
  KlOptions kl;
  std::vector<std::size_t> heavy_hitter_k = {5, 10, 20, 50};
};

struct Evaluation {
  double kl_popular_calls = 0;
  // K -> similarity; K values without enough support are left out.
  std::vector<std::pair<std::size_t, double>> heavy_hitter;
  double emd_response_time = 0;
  double emd_in_degree = 0;
  double emd_out_degree = 0;
  double memorization_rate = 0;
};

Evaluation evaluate(std::span<const CallGraph> real, std::span<const CallGraph> synthetic,
                    const EvaluationOptions& options = {});

}  // namespace tracegen
