// Copyright 2026 The tracegen Authors
// SPDX-License-Identifier: Apache-2.0

#include "tracegen/validator.hpp"

#include <algorithm>
#include <map>

#include "tracegen/graph.hpp"

namespace tracegen {
namespace {

bool is_type_token(std::string_view s) {
  if (s.empty()) return false;
  return std::all_of(s.begin(), s.end(),
                     [](char c) { return (c >= 'A' && c <= 'Z') || (c >= '0' && c <= '9') || c == '_'; });
}

std::string num(std::int64_t v) { return std::to_string(v); }

void check_edges(std::span<const LayerEdge> edges, const LayerConditions& conds, const LayerCheckOptions& options,
                 ValidationReport& out) {
  if (edges.empty()) out.push_back({ViolationCode::kECount, "layer has no edges", std::nullopt});
  if (static_cast<std::int64_t>(edges.size()) > conds.num_edges)
    out.push_back({ViolationCode::kECount,
                   num(static_cast<std::int64_t>(edges.size())) + " edges exceed the budget of " + num(conds.num_edges),
                   std::nullopt});

  for (std::size_t i = 0; i < edges.size(); ++i) {
    const LayerEdge& e = edges[i];
    std::int64_t want = conds.start_edge_id + static_cast<std::int64_t>(i);
    if (e.flat_edge_id != want)
      out.push_back({ViolationCode::kECount, "edge id " + num(e.flat_edge_id) + ", expected " + num(want), i});

    if (e.destination.empty() || e.destination == NodeId::client() || e.destination == NodeId::none())
      out.push_back({ViolationCode::kEFields, "bad destination '" + e.destination.str() + "'", i});
    else if (!is_type_token(e.comm_type))
      out.push_back({ViolationCode::kEFields, "bad communication type '" + e.comm_type + "'", i});
    else if (!options.known_comm_types.empty() && !options.known_comm_types.count(e.comm_type))
      out.push_back({ViolationCode::kEFields, "unknown communication type '" + e.comm_type + "'", i});

    if (e.start_ms < conds.start_communication_at_ms)
      out.push_back({ViolationCode::kEStartLow,
                     "start " + num(e.start_ms) + " before " + num(conds.start_communication_at_ms), i});
    if (e.start_ms > e.finish_ms)
      out.push_back({ViolationCode::kEStartOrder, "start " + num(e.start_ms) + " after finish " + num(e.finish_ms), i});
    if (e.finish_ms > conds.latency_ms)
      out.push_back({ViolationCode::kEFinishLatency,
                     "finish " + num(e.finish_ms) + " exceeds latency " + num(conds.latency_ms), i});
  }
}

void check_children(std::span<const LayerEdge> edges, std::span<const ChildConditions> children,
                    const LayerConditions& conds, ValidationReport& out) {
  if (children.empty()) {
    if (conds.remaining_depth >= 2)
      out.push_back({ViolationCode::kSDepthOne,
                     "remaining depth " + num(conds.remaining_depth) + " but no subgraph continues", std::nullopt});
    return;
  }
  std::int64_t budget = conds.num_edges - static_cast<std::int64_t>(edges.size());
  if (conds.remaining_depth <= 1 || budget <= 0) {
    out.push_back({ViolationCode::kSUnexpected,
                   num(static_cast<std::int64_t>(children.size())) + " subgraph blocks with remaining depth " +
                       num(conds.remaining_depth) + " and " + num(budget) + " edges left",
                   0});
    return;
  }

  std::map<std::int64_t, std::size_t> by_id;
  for (std::size_t i = 0; i < edges.size(); ++i) by_id.emplace(edges[i].flat_edge_id, i);
  std::map<std::int64_t, std::size_t> referenced;
  bool has_next_depth = false;

  for (std::size_t i = 0; i < children.size(); ++i) {
    const ChildConditions& child = children[i];
    const LayerConditions& c = child.conditions;
    if (c.remaining_depth == conds.remaining_depth - 1) has_next_depth = true;
    if (c.remaining_depth >= conds.remaining_depth)
      out.push_back({ViolationCode::kSDepthLt,
                     "child remaining depth " + num(c.remaining_depth) + " not below " + num(conds.remaining_depth), i});
    if (c.caller != conds.start_node)
      out.push_back({ViolationCode::kSCaller, "caller " + c.caller.str() + " != " + conds.start_node.str(), i});

    auto edge = by_id.find(child.parent_edge_id);
    if (edge == by_id.end()) {
      out.push_back({ViolationCode::kSEdgeRef, "edge " + num(child.parent_edge_id) + " was not generated", i});
      continue;
    }
    if (!referenced.emplace(child.parent_edge_id, i).second) {
      out.push_back({ViolationCode::kSEdgeRef, "edge " + num(child.parent_edge_id) + " extended twice", i});
      continue;
    }
    const LayerEdge& parent = edges[edge->second];
    if (c.start_node != parent.destination)
      out.push_back(
          {ViolationCode::kSStartNode, "start node " + c.start_node.str() + " != " + parent.destination.str(), i});
    if (c.latency_ms > parent.finish_ms)
      out.push_back({ViolationCode::kSLatency,
                     "latency " + num(c.latency_ms) + " exceeds parent finish " + num(parent.finish_ms), i});
    if (c.start_communication_at_ms < parent.start_ms)
      out.push_back({ViolationCode::kSStartTime,
                     "start " + num(c.start_communication_at_ms) + " before parent start " + num(parent.start_ms), i});
  }
  if (!has_next_depth)
    out.push_back({ViolationCode::kSDepthOne,
                   "no subgraph has remaining depth " + num(conds.remaining_depth - 1), std::nullopt});
}

void check_edge_sum(std::span<const LayerEdge> edges, std::span<const ChildConditions> children,
                    const LayerConditions& conds, ValidationReport& out) {
  std::int64_t total = static_cast<std::int64_t>(edges.size());
  for (const auto& c : children) total += c.conditions.num_edges;
  if (total != conds.num_edges)
    out.push_back({ViolationCode::kTEdgeSum,
                   "layer edges plus subgraph budgets = " + num(total) + ", expected " + num(conds.num_edges),
                   std::nullopt});
}

}  // namespace

ValidationReport validate_layer(std::span<const LayerEdge> edges, std::span<const ChildConditions> children,
                                const LayerConditions& conds, const LayerCheckOptions& options) {
  ValidationReport out;
  check_edges(edges, conds, options, out);
  check_children(edges, children, conds, out);
  check_edge_sum(edges, children, conds, out);
  return out;
}

ValidationReport validate_parsed_layer(const ParsedLayer& layer, const LayerConditions& conds,
                                       const LayerCheckOptions& options) {
  ValidationReport out = validate_layer(layer.edges, layer.children, conds, options);
  if (layer.edge_note) {
    const EdgeCountNote& n = *layer.edge_note;
    bool ok = n.count == n.last_id - n.first_id + 1 && !layer.edges.empty() &&
              n.first_id == layer.edges.front().flat_edge_id && n.last_id == layer.edges.back().flat_edge_id &&
              n.count == static_cast<std::int64_t>(layer.edges.size());
    if (!ok)
      out.push_back({ViolationCode::kFFormat,
                     "edge-count scratchpad reads " + num(n.last_id) + " - " + num(n.first_id) + " + 1 = " +
                         num(n.count),
                     std::nullopt});
  }
  for (std::size_t i = 0; i < layer.depth_notes.size(); ++i) {
    const auto& d = layer.depth_notes[i];
    if (d && *d != conds.remaining_depth - 1)
      out.push_back({ViolationCode::kFFormat,
                     "depth scratchpad reads " + num(*d) + ", expected " + num(conds.remaining_depth - 1), i});
  }
  return out;
}

ViolationCode violation_for(ParseErrorCode code) noexcept {
  return code == ParseErrorCode::kBadEdgeLine ? ViolationCode::kEFields : ViolationCode::kFFormat;
}

ValidationReport validate_layer_text(std::string_view text, const LayerConditions& conds,
                                     const LayerCheckOptions& options, ParsedLayer* parsed) {
  ParsedLayer layer;
  try {
    layer = parse_layer_output(text, conds.service_id);
  } catch (const ParseError& e) {
    return {{violation_for(e.code()), e.what(), e.line() ? std::optional<std::size_t>(e.line()) : std::nullopt}};
  }
  ValidationReport out = validate_parsed_layer(layer, conds, options);
  if (parsed) *parsed = std::move(layer);
  return out;
}

GenerationTarget GenerationTarget::from(const LayerConditions& prompt) {
  return {prompt.num_edges, prompt.remaining_depth, prompt.latency_ms};
}

AccuracyVerdict validate_generation(const CallGraph& g, const GenerationTarget& target) {
  AccuracyVerdict v;
  v.violations = check_structure(g);
  if (!v.violations.empty()) return v;
  GraphAttributes a = attributes(g);
  v.matched_num_edges = !target.num_edges || *target.num_edges == a.num_edges;
  v.matched_depth = !target.depth || *target.depth == a.depth;
  v.matched_latency = !target.latency_ms || *target.latency_ms == a.latency_ms;
  if (!v.matched_num_edges)
    v.violations.push_back({ViolationCode::kTEdgeSum,
                            "graph has " + num(a.num_edges) + " edges, prompted " + num(*target.num_edges),
                            std::nullopt});
  v.valid = v.violations.empty() && v.matched_num_edges && v.matched_depth && v.matched_latency;
  return v;
}

std::string_view to_string(InstructionTag tag) noexcept {
  return tag == InstructionTag::kHighLatency ? "HIGH_LATENCY" : "UNCOMMON_COMM";
}

std::optional<InstructionTag> instruction_tag_from_string(std::string_view s) noexcept {
  if (s == "HIGH_LATENCY") return InstructionTag::kHighLatency;
  if (s == "UNCOMMON_COMM") return InstructionTag::kUncommonComm;
  return std::nullopt;
}

bool check_instruction_compliance(const CallGraph& g, const Instruction& instruction, const CorpusStats& stats) {
  auto p90 = stats.per_service_p90_latency.find(g.service_id);
  if (p90 == stats.per_service_p90_latency.end())
    throw UnknownServiceError("service " + g.service_id.str() + " not in corpus statistics");
  if (instruction.tag == InstructionTag::kHighLatency) {
    if (g.edges.empty()) return false;
    return attributes(g).latency_ms >= p90->second;
  }
  if (!instruction.call) return false;
  const CallTriple& t = *instruction.call;
  return std::any_of(g.edges.begin(), g.edges.end(), [&](const Edge& e) {
    return e.source == t.source && e.destination == t.destination && e.comm_type == t.comm_type;
  });
}

bool check_instruction_compliance(const CallGraph& g, std::span<const Instruction> instructions,
                                  const CorpusStats& stats) {
  bool ok = true;
  for (const auto& i : instructions) ok = check_instruction_compliance(g, i, stats) && ok;
  return ok;
}

}  // namespace tracegen
