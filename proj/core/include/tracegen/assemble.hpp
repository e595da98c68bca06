// Copyright 2026 The tracegen Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstddef>
#include <map>
#include <set>
#include <span>
#include <string>
#include <vector>

#include "tracegen/model.hpp"
#include "tracegen/trace_reader.hpp"

namespace tracegen {

struct AssembleOptions {
  // Upstream names that mark the user entry point; rewritten to "Client".
  std::set<std::string> root_aliases = {"USER", "user", "Client", "client"};
};

struct RejectSummary {
  // Rejected graphs keyed by GraphError kind name.
  std::map<std::string, std::size_t> graphs_by_reason;
  // Calls dropped for lacking source, destination or type.
  std::size_t dropped_records = 0;
  std::size_t malformed_rows = 0;

  std::size_t rejected_graphs() const;
};

struct AssembleResult {
  std::vector<CallGraph> graphs;
  RejectSummary rejects;
};

// Groups records by trace id (in order of first appearance), drops calls with
// missing endpoints or type, builds each graph, and renumbers edge ids
// canonically. Root start times are normalized to 0.
AssembleResult assemble_graphs(std::span<const RawEdgeRecord> records, const AssembleOptions& options = {});

// Keeps the first graph of every canonical_hash, preserving order.
std::vector<CallGraph> deduplicate(std::span<const CallGraph> graphs);

}  // namespace tracegen
