// Copyright 2026 The tracegen Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <compare>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace tracegen {

// A vertex of a call graph: a microservice ("MS_12345"), a service
// ("S_123456789"), or the reserved entry caller "Client". Names are not
// validated on construction because real datasets (and the textual examples)
// use free-form names; kind() classifies them instead.
class NodeId {
 public:
  enum class Kind { kClient, kService, kMicroservice, kNone, kOther };

  NodeId() = default;
  explicit NodeId(std::string name) : name_(std::move(name)) {}

  static NodeId client() { return NodeId("Client"); }
  // Caller of the root layer; there is nobody upstream of the client.
  static NodeId none() { return NodeId("None"); }

  const std::string& str() const noexcept { return name_; }
  bool empty() const noexcept { return name_.empty(); }
  Kind kind() const noexcept;

  friend bool operator==(const NodeId&, const NodeId&) = default;
  friend auto operator<=>(const NodeId&, const NodeId&) = default;

 private:
  std::string name_;
};

// Hierarchical dot-decimal RPC identifier, e.g. "0.1.2".
class EdgeId {
 public:
  EdgeId() = default;
  explicit EdgeId(std::vector<std::uint32_t> path) : path_(std::move(path)) {}

  // Throws std::invalid_argument unless `text` is non-empty dot-decimal.
  static EdgeId parse(std::string_view text);
  static std::optional<EdgeId> try_parse(std::string_view text) noexcept;

  const std::vector<std::uint32_t>& path() const noexcept { return path_; }
  std::size_t depth() const noexcept { return path_.size(); }
  bool is_root() const noexcept { return path_.size() == 1; }
  EdgeId parent() const;
  EdgeId child(std::uint32_t index) const;
  std::string str() const;

  friend bool operator==(const EdgeId&, const EdgeId&) = default;
  friend auto operator<=>(const EdgeId&, const EdgeId&) = default;

 private:
  std::vector<std::uint32_t> path_;
};

struct Edge {
  EdgeId edge_id;
  NodeId source;
  NodeId destination;
  std::string comm_type;
  std::int64_t start_ms = 0;
  std::int64_t finish_ms = 0;

  std::int64_t duration_ms() const noexcept { return finish_ms - start_ms; }
  friend bool operator==(const Edge&, const Edge&) = default;
};

struct CallGraph {
  std::string trace_id;
  NodeId service_id;
  std::vector<Edge> edges;

  friend bool operator==(const CallGraph&, const CallGraph&) = default;
};

struct GraphAttributes {
  NodeId service_id;
  std::int64_t num_edges = 0;
  std::int64_t depth = 0;
  std::int64_t latency_ms = 0;

  friend bool operator==(const GraphAttributes&, const GraphAttributes&) = default;
};

// The prompt for one layer. Times are absolute within the graph.
struct LayerConditions {
  NodeId start_node;
  NodeId caller;
  std::int64_t remaining_depth = 0;
  std::int64_t num_edges = 0;
  std::int64_t start_edge_id = 0;
  std::int64_t latency_ms = 0;
  std::int64_t start_communication_at_ms = 0;
  NodeId service_id;

  friend bool operator==(const LayerConditions&, const LayerConditions&) = default;
};

// One edge of a layer; the source is implied by the layer's start node.
struct LayerEdge {
  std::int64_t flat_edge_id = 0;
  NodeId destination;
  std::string comm_type;
  std::int64_t start_ms = 0;
  std::int64_t finish_ms = 0;

  friend bool operator==(const LayerEdge&, const LayerEdge&) = default;
};

// Conditions of a child layer together with the flat id of the edge in the
// current layer that it extends.
struct ChildConditions {
  std::int64_t parent_edge_id = 0;
  LayerConditions conditions;

  friend bool operator==(const ChildConditions&, const ChildConditions&) = default;
};

struct Layer {
  LayerConditions conditions;
  std::vector<LayerEdge> edges;
  std::vector<ChildConditions> children;

  friend bool operator==(const Layer&, const Layer&) = default;
};

// Machine-readable constraint codes. G_* are whole-graph invariants; the
// remaining fifteen form the per-layer catalog checked on model output.
enum class ViolationCode {
  kGRoot,
  kGParentLink,
  kGSourceMatch,
  kGTimeNest,
  kGEdgeTime,
  kGDupId,
  kFFormat,
  kEFields,
  kECount,
  kEStartLow,
  kEStartOrder,
  kEFinishLatency,
  kSUnexpected,
  kSEdgeRef,
  kSDepthLt,
  kSDepthOne,
  kSStartNode,
  kSCaller,
  kSLatency,
  kSStartTime,
  kTEdgeSum,
};

std::string_view to_string(ViolationCode code) noexcept;
std::optional<ViolationCode> violation_code_from_string(std::string_view text) noexcept;
const std::vector<ViolationCode>& layer_violation_catalog();

struct Violation {
  ViolationCode code;
  std::string detail;
  // Edge index or subgraph index, depending on the code.
  std::optional<std::size_t> location;

  friend bool operator==(const Violation&, const Violation&) = default;
};

using ValidationReport = std::vector<Violation>;

bool contains(const ValidationReport& report, ViolationCode code);

// Raised by corpus-level operations that need at least one graph or sample.
class EmptyCorpusError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace tracegen

template <>
struct std::hash<tracegen::NodeId> {
  std::size_t operator()(const tracegen::NodeId& n) const noexcept {
    return std::hash<std::string>{}(n.str());
  }
};
