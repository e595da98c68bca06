// Copyright 2026 The tracegen Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "tracegen/model.hpp"

namespace tracegen {

// One call as seen by graph construction. Times are milliseconds and may be
// fractional; build_graph rounds them half-up.
struct EdgeRecord {
  std::string trace_id;
  std::string edge_id;
  std::optional<NodeId> source;
  std::optional<NodeId> destination;
  std::optional<std::string> comm_type;
  std::optional<double> start_ms;
  std::optional<double> finish_ms;
};

class GraphError : public std::runtime_error {
 public:
  enum class Kind {
    kMissingField,
    kMalformedEdgeId,
    kMixedTraces,
    kDisconnected,
    kDuplicateEdgeId,
    kSourceMismatch,
    kInvalidInterval,
    kTimeNestingViolation,
    kMultipleRoots,
  };

  GraphError(Kind kind, const std::string& message) : std::runtime_error(message), kind_(kind) {}
  Kind kind() const noexcept { return kind_; }

 private:
  Kind kind_;
};

std::string_view to_string(GraphError::Kind kind) noexcept;

// Assembles one call graph. Edges come back sorted by EdgeId and shifted so
// the root starts at 0. Throws GraphError when any CallGraph invariant fails.
CallGraph build_graph(std::span<const EdgeRecord> records, const NodeId& service_id);

GraphAttributes attributes(const CallGraph& g);

// Every violated CallGraph invariant; empty iff the graph is valid.
ValidationReport check_structure(const CallGraph& g);

// Returns the root edge; the graph must have exactly one.
const Edge& root_edge(const CallGraph& g);

// Order of siblings within a layer: ascending start, then destination, with
// comm type, finish and edge id as final tie-breakers.
bool sibling_before(const Edge& a, const Edge& b);

// Renumbers edge ids so the root is "0" and the children of every edge are
// numbered 1..k in sibling order. Requires a valid graph.
CallGraph canonicalize_edge_ids(const CallGraph& g);

std::int64_t round_half_up(double ms);

}  // namespace tracegen
