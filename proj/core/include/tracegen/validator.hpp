// Copyright 2026 The tracegen Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <optional>
#include <set>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "tracegen/codec.hpp"
#include "tracegen/model.hpp"
#include "tracegen/stats.hpp"

namespace tracegen {

struct LayerCheckOptions {
  // When non-empty, comm types outside this set are reported as E_FIELDS.
  std::set<std::string> known_comm_types;
};

// Checks one layer against its conditions and reports every violation.
// Times are absolute; child latency is compared against the parent edge's
// finish time.
ValidationReport validate_layer(std::span<const LayerEdge> edges, std::span<const ChildConditions> children,
                                const LayerConditions& conds, const LayerCheckOptions& options = {});

// Like validate_layer, plus the scratchpad arithmetic when present.
ValidationReport validate_parsed_layer(const ParsedLayer& layer, const LayerConditions& conds,
                                       const LayerCheckOptions& options = {});

// Parses raw completion text and validates it. Edge-line syntax errors map to
// E_FIELDS, every other parse error to F_FORMAT. `parsed` receives the layer
// when parsing succeeded.
ValidationReport validate_layer_text(std::string_view text, const LayerConditions& conds,
                                     const LayerCheckOptions& options = {}, ParsedLayer* parsed = nullptr);

ViolationCode violation_for(ParseErrorCode code) noexcept;

// The attributes a generation was asked for; absent ones are not compared.
struct GenerationTarget {
  std::optional<std::int64_t> num_edges;
  std::optional<std::int64_t> depth;
  std::optional<std::int64_t> latency_ms;

  static GenerationTarget from(const LayerConditions& prompt);
};

struct AccuracyVerdict {
  bool valid = false;
  bool matched_num_edges = false;
  bool matched_depth = false;
  bool matched_latency = false;
  ValidationReport violations;
};

AccuracyVerdict validate_generation(const CallGraph& g, const GenerationTarget& target);

enum class InstructionTag { kHighLatency, kUncommonComm };
std::string_view to_string(InstructionTag tag) noexcept;
std::optional<InstructionTag> instruction_tag_from_string(std::string_view s) noexcept;

struct Instruction {
  InstructionTag tag = InstructionTag::kHighLatency;
  // Set for kUncommonComm.
  std::optional<CallTriple> call;

  friend bool operator==(const Instruction&, const Instruction&) = default;
};

class UnknownServiceError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Throws UnknownServiceError when g's service is absent from `stats`.
bool check_instruction_compliance(const CallGraph& g, const Instruction& instruction, const CorpusStats& stats);
// All instructions at once; true iff each one holds.
bool check_instruction_compliance(const CallGraph& g, std::span<const Instruction> instructions,
                                  const CorpusStats& stats);

}  // namespace tracegen
