// Copyright 2026 The tracegen Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "tracegen/codec.hpp"
#include "tracegen/graph_json.hpp"
#include "tracegen/hash.hpp"
#include "tracegen/model.hpp"
#include "tracegen/stats.hpp"
#include "tracegen/validator.hpp"

namespace tracegen {

inline constexpr std::string_view kDefaultSystemPrompt =
    "You generate microservice call graphs one layer at a time from the given conditions.";

// ---- pre-training --------------------------------------------------------

// All layers of `g` concatenated in pre-order, without scratchpads. The graph
// attributes in the first header (remaining_depth, num_edges, latency) are
// each dropped with probability p_drop and the header lines are shuffled;
// the remaining fields are always present since they tie layers together.
TextSample pretraining_sample(const CallGraph& g, double p_drop, std::uint64_t seed);

// Sample i uses derive_seed(seed, i).
std::vector<TextSample> build_pretraining_corpus(std::span<const CallGraph> graphs, double p_drop, std::uint64_t seed,
                                                 unsigned jobs = 1);

// Rebuilds the source graph of a pre-training sample.
CallGraph reconstruct_pretraining_sample(std::string_view text, const std::string& trace_id = {});

// ---- tabular -------------------------------------------------------------

TextSample tabular_sample(const CallGraph& g, double p_drop, std::uint64_t seed);
std::vector<TextSample> build_tabular_corpus(std::span<const CallGraph> graphs, double p_drop, std::uint64_t seed,
                                             unsigned jobs = 1);

// ---- instruction tuning --------------------------------------------------

struct InstructionSample {
  std::string system_prompt;
  std::string instruction;
  std::string output;
  // Offset of `output` inside full_text(); everything before it is prompt.
  std::size_t loss_mask_boundary = 0;
  std::vector<Instruction> special;  // at most one
  std::optional<Digest> origin_hash;
  std::size_t graph_index = 0;
  std::size_t layer_index = 0;
  LayerConditions conditions;

  std::string full_text() const;
  bool has_tag(InstructionTag tag) const;
};

struct InstructionOptions {
  double fraction = 0.05;
  std::uint64_t seed = 0;
  std::string system_prompt = std::string(kDefaultSystemPrompt);
  unsigned jobs = 1;
};

// Indices of the ceil(fraction * n) graphs selected for instruction tuning,
// ascending.
std::vector<std::size_t> select_graphs(std::size_t n, double fraction, std::uint64_t seed);

// Natural-language restatement of a layer's conditions.
std::string describe_conditions(const LayerConditions& c, std::uint64_t seed);

std::string special_instruction_text(const Instruction& instruction);

// The special instruction attached to graph `graph_index`, if it qualifies.
// A graph that qualifies for both tags gets one of them, alternating with
// (seed + graph_index).
std::optional<Instruction> choose_special(const CallGraph& g, const CorpusStats& stats, std::size_t graph_index,
                                          std::uint64_t seed);

// One sample per layer of every selected graph. Throws EmptyCorpusError when
// `graphs` is empty and std::invalid_argument for a fraction outside (0, 1].
std::vector<InstructionSample> build_instruction_corpus(std::span<const CallGraph> graphs, const CorpusStats& stats,
                                                        const InstructionOptions& options = {});

// ---- serialization -------------------------------------------------------

Json to_json(const TextSample& s);
Json to_json(const InstructionSample& s);

struct CorpusHeader {
  std::string kind;  // "pretrain", "tabular" or "instruction"
  std::optional<double> p_drop;
  std::optional<double> fraction;
  std::uint64_t seed = 0;
  std::optional<Digest> source_stats_digest;
};

Json to_json(const CorpusHeader& h);
Digest stats_digest(const CorpusStats& stats);

void write_corpus(const std::string& path, const CorpusHeader& header, std::span<const TextSample> samples);
void write_corpus(const std::string& path, const CorpusHeader& header, std::span<const InstructionSample> samples);

}  // namespace tracegen
