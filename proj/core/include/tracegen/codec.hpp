// Copyright 2026 The tracegen Authors
// SPDX-License-Identifier: Apache-2.0

// Text formats for call graphs.
//
// Edges are rendered as comma-separated natural-language clauses:
//
//   Edge ID is 0, Source is Client, Destination is Front end, Type is HTTP,
//   Communication starts at 0 ms, Communication finishes at 24 ms
//
// (one line; layer edges drop the Source clause and use flat integer ids).
// Headers are "name: value" lines. Blocks are delimited by the literal
// lines <edges>, </edges>, <subgraph>, </subgraph>. Node names must not
// contain ", " or line breaks. The full grammar is in docs/text_format.md.

#pragma once

#include <array>
#include <cstdint>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "tracegen/hash.hpp"
#include "tracegen/model.hpp"

namespace tracegen {

inline constexpr std::string_view kFormatVersion = "1";

enum class SampleFormat { kTabular, kRecursiveLayer };
std::string_view to_string(SampleFormat f) noexcept;
std::optional<SampleFormat> sample_format_from_string(std::string_view s) noexcept;

struct TextSample {
  std::string text;
  SampleFormat format = SampleFormat::kRecursiveLayer;
  std::optional<Digest> origin_hash;
};

enum class ParseErrorCode {
  kMissingEdgesBlock,
  kUnclosedBlock,
  kBadEdgeLine,
  kBadSubgraphField,
  kBadHeaderField,
  kUnexpectedContent,
};
std::string_view to_string(ParseErrorCode code) noexcept;

class ParseError : public std::runtime_error {
 public:
  ParseError(ParseErrorCode code, std::size_t line, std::string field, const std::string& message);

  ParseErrorCode code() const noexcept { return code_; }
  // 1-based line number, 0 when not tied to a line.
  std::size_t line() const noexcept { return line_; }
  const std::string& field() const noexcept { return field_; }

 private:
  ParseErrorCode code_;
  std::size_t line_;
  std::string field_;
};

// A tabular sample parsed fine but the graph breaks structural invariants.
class StructuralViolation : public std::runtime_error {
 public:
  explicit StructuralViolation(ValidationReport report);
  const ValidationReport& report() const noexcept { return report_; }

 private:
  ValidationReport report_;
};

// ---- edges ---------------------------------------------------------------

enum class EdgeFeature { kEdgeId, kSource, kDestination, kType, kStart, kFinish };
using FeatureOrder = std::array<EdgeFeature, 6>;
inline constexpr FeatureOrder kDefaultFeatureOrder = {EdgeFeature::kEdgeId, EdgeFeature::kSource,
                                                      EdgeFeature::kDestination, EdgeFeature::kType,
                                                      EdgeFeature::kStart, EdgeFeature::kFinish};

std::string encode_edge_nl(const Edge& e, const FeatureOrder& order = kDefaultFeatureOrder);
// Accepts the six clauses in any order; throws ParseError(kBadEdgeLine).
Edge parse_edge_nl(std::string_view line);

std::string encode_layer_edge(const LayerEdge& e);
LayerEdge parse_layer_edge(std::string_view line);

// ---- tabular whole-graph format ------------------------------------------

// Which optional graph attributes stay in the header. The service id is
// always written.
struct AttributeKeep {
  bool num_edges = true;
  bool depth = true;
  bool latency = true;
};

TextSample encode_tabular_sample(const CallGraph& g, std::uint64_t seed, const AttributeKeep& keep = {});

struct TabularParse {
  CallGraph graph;
  std::map<std::string, std::int64_t> attributes;  // num_edges / depth / latency when present
};

// Throws ParseError on syntax errors and StructuralViolation when the edges
// do not form a valid call graph.
TabularParse parse_tabular_sample_full(std::string_view text);
CallGraph parse_tabular_sample(std::string_view text);

// ---- recursive layer format ----------------------------------------------

enum class ConditionField {
  kServiceId,
  kStartNode,
  kCaller,
  kRemainingDepth,
  kNumEdges,
  kStartEdgeId,
  kLatency,
  kStartCommunicationAt,
};
inline constexpr std::size_t kConditionFieldCount = 8;
std::string_view field_name(ConditionField f) noexcept;

struct HeaderOptions {
  std::array<bool, kConditionFieldCount> keep = {true, true, true, true, true, true, true, true};
  // Shuffle line order with this seed; fixed order when absent.
  std::optional<std::uint64_t> shuffle_seed;
};

// "name: value" lines for every kept field, each terminated by '\n'.
std::string render_conditions(const LayerConditions& c, const HeaderOptions& options = {});

// The prompt sent to a backend for one layer.
inline std::string render_prompt(const LayerConditions& c) { return render_conditions(c); }

// Everything after the header: the edges block and one subgraph block per
// child. With intermediates, the edge-count scratchpad closes the edges
// block and each subgraph block opens with the depth scratchpad.
std::string render_layer_completion(const LayerConditions& c, const std::vector<LayerEdge>& edges,
                                    const std::vector<ChildConditions>& children, bool with_intermediate);

TextSample encode_layer(const LayerConditions& c, const std::vector<LayerEdge>& edges,
                        const std::vector<ChildConditions>& children, bool with_intermediate);

struct PartialConditions {
  std::optional<NodeId> service_id;
  std::optional<NodeId> start_node;
  std::optional<NodeId> caller;
  std::optional<std::int64_t> remaining_depth;
  std::optional<std::int64_t> num_edges;
  std::optional<std::int64_t> start_edge_id;
  std::optional<std::int64_t> latency_ms;
  std::optional<std::int64_t> start_communication_at_ms;

  bool empty() const;
  std::optional<LayerConditions> complete() const;
  std::vector<std::string> missing_fields() const;
};

struct EdgeCountNote {
  std::int64_t last_id = 0;
  std::int64_t first_id = 0;
  std::int64_t count = 0;
};

struct ParsedLayer {
  PartialConditions header;
  std::vector<LayerEdge> edges;
  std::vector<ChildConditions> children;
  std::optional<EdgeCountNote> edge_note;
  // Depth scratchpad value per child, when present.
  std::vector<std::optional<std::int64_t>> depth_notes;
};

// Parses one layer: an optional header followed by exactly one edges block
// and any number of subgraph blocks. Children inherit the header's service
// id, or `service` when the text has no header.
ParsedLayer parse_layer_output(std::string_view text, const NodeId& service = {});

// Parses a concatenation of layers (a pre-training sample).
std::vector<ParsedLayer> parse_layer_sequence(std::string_view text);

// Parses a header-only prompt; every field must be present.
LayerConditions parse_conditions(std::string_view text);
// Leading "name: value" lines of `text`, stopping at the first other line.
PartialConditions parse_header_prefix(std::string_view text);

inline constexpr std::string_view kEdgeCountScratchpad =
    "num generated edges = the last edge id - the first edge id + 1 = ";
inline constexpr std::string_view kDepthScratchpad = "Child's remaining depth = current remaining depth - 1 = ";

}  // namespace tracegen
