// Copyright 2026 The tracegen Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <istream>
#include <nlohmann/json.hpp>
#include <ostream>
#include <span>
#include <string>
#include <vector>

#include "tracegen/assemble.hpp"
#include "tracegen/model.hpp"
#include "tracegen/stats.hpp"

namespace tracegen {

// Insertion-ordered so emitted files have a fixed field order.
using Json = nlohmann::ordered_json;

Json to_json(const CallGraph& g);
CallGraph graph_from_json(const Json& j);

Json to_json(const LayerConditions& c);
LayerConditions conditions_from_json(const Json& j);

Json to_json(const Violation& v);
Json to_json(const ValidationReport& report);
Json to_json(const RejectSummary& r);

Json to_json(const CorpusStats& s);
CorpusStats stats_from_json(const Json& j);

// One graph per line. Blank lines are skipped; a malformed line throws
// std::runtime_error naming the line number.
std::vector<CallGraph> read_graphs_jsonl(std::istream& in);
std::vector<CallGraph> read_graphs_jsonl(const std::string& path);
void write_graphs_jsonl(std::ostream& out, std::span<const CallGraph> graphs);
void write_graphs_jsonl(const std::string& path, std::span<const CallGraph> graphs);

std::vector<Json> read_jsonl(const std::string& path);
Json read_json_file(const std::string& path);
void write_json_file(const std::string& path, const Json& j);

}  // namespace tracegen
