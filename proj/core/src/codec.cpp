// Copyright 2026 The tracegen Authors
// SPDX-License-Identifier: Apache-2.0

#include "tracegen/codec.hpp"

#include <algorithm>
#include <charconv>
#include <numeric>

#include "tracegen/graph.hpp"
#include "tracegen/rng.hpp"

namespace tracegen {
namespace {

constexpr std::string_view kEdgesOpen = "<edges>";
constexpr std::string_view kEdgesClose = "</edges>";
constexpr std::string_view kSubgraphOpen = "<subgraph>";
constexpr std::string_view kSubgraphClose = "</subgraph>";

constexpr std::string_view kClauseEdgeId = "Edge ID is ";
constexpr std::string_view kClauseSource = "Source is ";
constexpr std::string_view kClauseDestination = "Destination is ";
constexpr std::string_view kClauseType = "Type is ";
constexpr std::string_view kClauseStart = "Communication starts at ";
constexpr std::string_view kClauseFinish = "Communication finishes at ";
constexpr std::string_view kMs = " ms";

constexpr std::array<std::string_view, kConditionFieldCount> kFieldNames = {
    "service_id", "start_node", "caller", "remaining_depth", "num_edges", "start_edge_id", "latency",
    "start_communication_at"};

std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
  return s;
}

std::vector<std::string_view> split_lines(std::string_view text) {
  std::vector<std::string_view> lines;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    std::size_t nl = text.find('\n', pos);
    if (nl == std::string_view::npos) {
      if (pos < text.size()) lines.push_back(text.substr(pos));
      break;
    }
    lines.push_back(text.substr(pos, nl - pos));
    pos = nl + 1;
  }
  return lines;
}

std::optional<std::int64_t> parse_int(std::string_view s) {
  s = trim(s);
  if (s.empty()) return std::nullopt;
  std::int64_t v = 0;
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || ptr != s.data() + s.size()) return std::nullopt;
  return v;
}

std::vector<std::string_view> split_clauses(std::string_view line) {
  std::vector<std::string_view> out;
  std::size_t pos = 0;
  while (true) {
    std::size_t sep = line.find(", ", pos);
    if (sep == std::string_view::npos) {
      out.push_back(trim(line.substr(pos)));
      return out;
    }
    out.push_back(trim(line.substr(pos, sep - pos)));
    pos = sep + 2;
  }
}

[[noreturn]] void bad_edge(std::string_view line, std::size_t lineno, const std::string& why) {
  throw ParseError(ParseErrorCode::kBadEdgeLine, lineno, "", "bad edge line '" + std::string(line) + "': " + why);
}

std::optional<std::int64_t> parse_ms(std::string_view v) {
  if (!v.ends_with(kMs)) return std::nullopt;
  return parse_int(v.substr(0, v.size() - kMs.size()));
}

// Raw clause values keyed by feature.
struct Clauses {
  std::array<std::optional<std::string_view>, 6> value;
};

Clauses read_clauses(std::string_view line, std::size_t lineno) {
  static constexpr std::array<std::pair<EdgeFeature, std::string_view>, 6> kPrefixes = {{
      {EdgeFeature::kEdgeId, kClauseEdgeId},
      {EdgeFeature::kSource, kClauseSource},
      {EdgeFeature::kDestination, kClauseDestination},
      {EdgeFeature::kType, kClauseType},
      {EdgeFeature::kStart, kClauseStart},
      {EdgeFeature::kFinish, kClauseFinish},
  }};
  Clauses c;
  for (std::string_view clause : split_clauses(line)) {
    bool matched = false;
    for (const auto& [feature, prefix] : kPrefixes) {
      if (!clause.starts_with(prefix)) continue;
      auto& slot = c.value[static_cast<std::size_t>(feature)];
      if (slot) bad_edge(line, lineno, "repeated clause '" + std::string(prefix) + "'");
      slot = trim(clause.substr(prefix.size()));
      if (slot->empty()) bad_edge(line, lineno, "empty clause '" + std::string(prefix) + "'");
      matched = true;
      break;
    }
    if (!matched) bad_edge(line, lineno, "unknown clause '" + std::string(clause) + "'");
  }
  return c;
}

Edge edge_from_line(std::string_view line, std::size_t lineno) {
  Clauses c = read_clauses(line, lineno);
  for (std::size_t i = 0; i < 6; ++i)
    if (!c.value[i]) bad_edge(line, lineno, "expected 6 fields");
  Edge e;
  auto id = EdgeId::try_parse(*c.value[0]);
  if (!id) bad_edge(line, lineno, "edge id is not dot-decimal");
  e.edge_id = *id;
  e.source = NodeId(std::string(*c.value[1]));
  e.destination = NodeId(std::string(*c.value[2]));
  e.comm_type = std::string(*c.value[3]);
  auto start = parse_ms(*c.value[4]);
  auto finish = parse_ms(*c.value[5]);
  if (!start || !finish) bad_edge(line, lineno, "times must be integers followed by ' ms'");
  e.start_ms = *start;
  e.finish_ms = *finish;
  return e;
}

LayerEdge layer_edge_from_line(std::string_view line, std::size_t lineno) {
  Clauses c = read_clauses(line, lineno);
  if (c.value[static_cast<std::size_t>(EdgeFeature::kSource)]) bad_edge(line, lineno, "layer edges have no source");
  for (auto f : {EdgeFeature::kEdgeId, EdgeFeature::kDestination, EdgeFeature::kType, EdgeFeature::kStart,
                 EdgeFeature::kFinish})
    if (!c.value[static_cast<std::size_t>(f)]) bad_edge(line, lineno, "expected 5 fields");
  LayerEdge e;
  auto id = parse_int(*c.value[0]);
  if (!id || *id < 0) bad_edge(line, lineno, "layer edge id must be a non-negative integer");
  e.flat_edge_id = *id;
  e.destination = NodeId(std::string(*c.value[2]));
  e.comm_type = std::string(*c.value[3]);
  auto start = parse_ms(*c.value[4]);
  auto finish = parse_ms(*c.value[5]);
  if (!start || !finish) bad_edge(line, lineno, "times must be integers followed by ' ms'");
  e.start_ms = *start;
  e.finish_ms = *finish;
  return e;
}

// "name: value" where name is [a-z_]+.
std::optional<std::pair<std::string_view, std::string_view>> split_header_line(std::string_view line) {
  std::size_t colon = line.find(": ");
  if (colon == std::string_view::npos || colon == 0) {
    // Allow "name:" with an empty value so missing values get a precise error.
    if (!line.empty() && line.back() == ':') colon = line.size() - 1;
    else return std::nullopt;
  }
  std::string_view name = line.substr(0, colon);
  if (!std::all_of(name.begin(), name.end(), [](char ch) { return (ch >= 'a' && ch <= 'z') || ch == '_'; }))
    return std::nullopt;
  std::string_view value = colon + 2 <= line.size() ? trim(line.substr(colon + 2)) : std::string_view{};
  return std::make_pair(name, value);
}

std::optional<ConditionField> field_by_name(std::string_view name) {
  for (std::size_t i = 0; i < kFieldNames.size(); ++i)
    if (kFieldNames[i] == name) return static_cast<ConditionField>(i);
  return std::nullopt;
}

// Returns false when the value does not fit the field.
bool assign_field(PartialConditions& pc, ConditionField f, std::string_view value, bool& duplicate) {
  auto set_node = [&](std::optional<NodeId>& slot) {
    duplicate = slot.has_value();
    if (value.empty()) return false;
    slot = NodeId(std::string(value));
    return true;
  };
  auto set_int = [&](std::optional<std::int64_t>& slot) {
    duplicate = slot.has_value();
    auto v = parse_int(value);
    if (!v) return false;
    slot = *v;
    return true;
  };
  switch (f) {
    case ConditionField::kServiceId: return set_node(pc.service_id);
    case ConditionField::kStartNode: return set_node(pc.start_node);
    case ConditionField::kCaller: return set_node(pc.caller);
    case ConditionField::kRemainingDepth: return set_int(pc.remaining_depth);
    case ConditionField::kNumEdges: return set_int(pc.num_edges);
    case ConditionField::kStartEdgeId: return set_int(pc.start_edge_id);
    case ConditionField::kLatency: return set_int(pc.latency_ms);
    case ConditionField::kStartCommunicationAt: return set_int(pc.start_communication_at_ms);
  }
  return false;
}

std::optional<std::int64_t> parse_depth_note(std::string_view line) {
  if (!line.starts_with(kDepthScratchpad)) return std::nullopt;
  return parse_int(line.substr(kDepthScratchpad.size()));
}

// "{j} - {i} + 1 = {n}"
std::optional<EdgeCountNote> parse_count_note(std::string_view line) {
  if (!line.starts_with(kEdgeCountScratchpad)) return std::nullopt;
  std::string_view rest = line.substr(kEdgeCountScratchpad.size());
  std::size_t minus = rest.find(" - ");
  std::size_t plus = rest.find(" + 1 = ");
  if (minus == std::string_view::npos || plus == std::string_view::npos || plus < minus) return std::nullopt;
  auto j = parse_int(rest.substr(0, minus));
  auto i = parse_int(rest.substr(minus + 3, plus - minus - 3));
  auto n = parse_int(rest.substr(plus + 7));
  if (!j || !i || !n) return std::nullopt;
  return EdgeCountNote{*j, *i, *n};
}

class LayerParser {
 public:
  LayerParser(const std::vector<std::string_view>& lines, bool sequence) : lines_(lines), sequence_(sequence) {}

  // Parses one layer starting at pos_. In sequence mode, stops before the
  // header of the next layer.
  ParsedLayer parse(const NodeId& inherited_service) {
    enum class State { kHeader, kEdges, kAfterEdges, kSubgraph };
    State state = State::kHeader;
    ParsedLayer out;
    PartialConditions child;
    std::int64_t child_edge = 0;
    bool has_child_edge = false;
    std::optional<std::int64_t> child_note;
    bool child_has_note = false;

    for (; pos_ < lines_.size(); ++pos_) {
      std::string_view line = trim(lines_[pos_]);
      std::size_t lineno = pos_ + 1;
      if (line.empty()) continue;
      switch (state) {
        case State::kHeader: {
          if (line == kEdgesOpen) {
            state = State::kEdges;
          } else if (line == kSubgraphOpen) {
            fail(ParseErrorCode::kMissingEdgesBlock, lineno, "", "subgraph block before the edges block");
          } else if (auto kv = split_header_line(line)) {
            auto f = field_by_name(kv->first);
            bool dup = false;
            if (!f || !assign_field(out.header, *f, kv->second, dup) || dup)
              fail(ParseErrorCode::kBadHeaderField, lineno, std::string(kv->first),
                   "bad header field '" + std::string(kv->first) + "'");
          } else {
            fail(ParseErrorCode::kUnexpectedContent, lineno, "", "unexpected line '" + std::string(line) + "'");
          }
          break;
        }
        case State::kEdges: {
          if (line == kEdgesClose) {
            state = State::kAfterEdges;
          } else if (line == kEdgesOpen || line == kSubgraphOpen || line == kSubgraphClose) {
            fail(ParseErrorCode::kUnclosedBlock, lineno, "", "edges block not closed before '" + std::string(line) + "'");
          } else if (line.starts_with(kEdgeCountScratchpad)) {
            auto note = parse_count_note(line);
            if (!note) fail(ParseErrorCode::kUnexpectedContent, lineno, "", "malformed edge-count scratchpad");
            out.edge_note = note;
          } else {
            out.edges.push_back(layer_edge_from_line(line, lineno));
          }
          break;
        }
        case State::kAfterEdges: {
          if (line == kSubgraphOpen) {
            state = State::kSubgraph;
            child = {};
            has_child_edge = false;
            child_note.reset();
            child_has_note = false;
          } else if (sequence_ && split_header_line(line)) {
            return finish(out, inherited_service);
          } else if (line == kEdgesOpen) {
            fail(ParseErrorCode::kUnexpectedContent, lineno, "", "second edges block");
          } else {
            fail(ParseErrorCode::kUnexpectedContent, lineno, "", "unexpected line '" + std::string(line) + "'");
          }
          break;
        }
        case State::kSubgraph: {
          if (line == kSubgraphClose) {
            if (!has_child_edge) fail(ParseErrorCode::kBadSubgraphField, lineno, "edge_id", "subgraph lacks edge_id");
            child.service_id = NodeId("-");  // filled in by finish()
            auto missing = child.missing_fields();
            if (!missing.empty())
              fail(ParseErrorCode::kBadSubgraphField, lineno, missing.front(),
                   "subgraph lacks '" + missing.front() + "'");
            out.children.push_back({child_edge, *child.complete()});
            out.depth_notes.push_back(child_has_note ? child_note : std::nullopt);
            state = State::kAfterEdges;
          } else if (line == kSubgraphOpen || line == kEdgesOpen || line == kEdgesClose) {
            fail(ParseErrorCode::kUnclosedBlock, lineno, "", "subgraph block not closed before '" + std::string(line) + "'");
          } else if (line.starts_with(kDepthScratchpad)) {
            child_note = parse_depth_note(line);
            if (!child_note) fail(ParseErrorCode::kUnexpectedContent, lineno, "", "malformed depth scratchpad");
            child_has_note = true;
          } else if (auto kv = split_header_line(line)) {
            if (kv->first == "edge_id") {
              auto v = parse_int(kv->second);
              if (!v || has_child_edge) fail(ParseErrorCode::kBadSubgraphField, lineno, "edge_id", "bad subgraph edge_id");
              child_edge = *v;
              has_child_edge = true;
              break;
            }
            auto f = field_by_name(kv->first);
            bool dup = false;
            if (!f || *f == ConditionField::kServiceId || !assign_field(child, *f, kv->second, dup) || dup)
              fail(ParseErrorCode::kBadSubgraphField, lineno, std::string(kv->first),
                   "bad subgraph field '" + std::string(kv->first) + "'");
          } else {
            fail(ParseErrorCode::kBadSubgraphField, lineno, std::string(line),
                 "unexpected subgraph line '" + std::string(line) + "'");
          }
          break;
        }
      }
    }
    if (state == State::kHeader) fail(ParseErrorCode::kMissingEdgesBlock, 0, "", "no <edges> block");
    if (state == State::kEdges || state == State::kSubgraph)
      fail(ParseErrorCode::kUnclosedBlock, lines_.size(), "", "block not closed at end of text");
    return finish(out, inherited_service);
  }

  bool done() {
    while (pos_ < lines_.size() && trim(lines_[pos_]).empty()) ++pos_;
    return pos_ >= lines_.size();
  }

 private:
  ParsedLayer finish(ParsedLayer& out, const NodeId& inherited_service) {
    NodeId service = out.header.service_id.value_or(inherited_service);
    for (auto& c : out.children) c.conditions.service_id = service;
    return std::move(out);
  }

  [[noreturn]] void fail(ParseErrorCode code, std::size_t line, std::string field, const std::string& msg) {
    throw ParseError(code, line, std::move(field), msg);
  }

  const std::vector<std::string_view>& lines_;
  bool sequence_;
  std::size_t pos_ = 0;
};

void append_field(std::string& out, ConditionField f, const LayerConditions& c) {
  out += field_name(f);
  out += ": ";
  switch (f) {
    case ConditionField::kServiceId: out += c.service_id.str(); break;
    case ConditionField::kStartNode: out += c.start_node.str(); break;
    case ConditionField::kCaller: out += c.caller.str(); break;
    case ConditionField::kRemainingDepth: out += std::to_string(c.remaining_depth); break;
    case ConditionField::kNumEdges: out += std::to_string(c.num_edges); break;
    case ConditionField::kStartEdgeId: out += std::to_string(c.start_edge_id); break;
    case ConditionField::kLatency: out += std::to_string(c.latency_ms); break;
    case ConditionField::kStartCommunicationAt: out += std::to_string(c.start_communication_at_ms); break;
  }
  out += '\n';
}

}  // namespace

std::string_view to_string(SampleFormat f) noexcept {
  return f == SampleFormat::kTabular ? "TABULAR" : "RECURSIVE_LAYER";
}

std::optional<SampleFormat> sample_format_from_string(std::string_view s) noexcept {
  if (s == "TABULAR") return SampleFormat::kTabular;
  if (s == "RECURSIVE_LAYER") return SampleFormat::kRecursiveLayer;
  return std::nullopt;
}

std::string_view to_string(ParseErrorCode code) noexcept {
  switch (code) {
    case ParseErrorCode::kMissingEdgesBlock: return "MISSING_EDGES_BLOCK";
    case ParseErrorCode::kUnclosedBlock: return "UNCLOSED_BLOCK";
    case ParseErrorCode::kBadEdgeLine: return "BAD_EDGE_LINE";
    case ParseErrorCode::kBadSubgraphField: return "BAD_SUBGRAPH_FIELD";
    case ParseErrorCode::kBadHeaderField: return "BAD_HEADER_FIELD";
    case ParseErrorCode::kUnexpectedContent: return "UNEXPECTED_CONTENT";
  }
  return "UNKNOWN";
}

ParseError::ParseError(ParseErrorCode code, std::size_t line, std::string field, const std::string& message)
    : std::runtime_error(std::string(to_string(code)) + (line ? " (line " + std::to_string(line) + ")" : "") + ": " +
                         message),
      code_(code),
      line_(line),
      field_(std::move(field)) {}

StructuralViolation::StructuralViolation(ValidationReport report)
    : std::runtime_error("structural violation: " +
                         (report.empty() ? std::string("?") : std::string(to_string(report.front().code)))),
      report_(std::move(report)) {}

std::string encode_edge_nl(const Edge& e, const FeatureOrder& order) {
  std::string out;
  for (std::size_t i = 0; i < order.size(); ++i) {
    if (i) out += ", ";
    switch (order[i]) {
      case EdgeFeature::kEdgeId: out += kClauseEdgeId; out += e.edge_id.str(); break;
      case EdgeFeature::kSource: out += kClauseSource; out += e.source.str(); break;
      case EdgeFeature::kDestination: out += kClauseDestination; out += e.destination.str(); break;
      case EdgeFeature::kType: out += kClauseType; out += e.comm_type; break;
      case EdgeFeature::kStart: out += kClauseStart; out += std::to_string(e.start_ms); out += kMs; break;
      case EdgeFeature::kFinish: out += kClauseFinish; out += std::to_string(e.finish_ms); out += kMs; break;
    }
  }
  return out;
}

Edge parse_edge_nl(std::string_view line) { return edge_from_line(trim(line), 0); }

std::string encode_layer_edge(const LayerEdge& e) {
  std::string out;
  out += kClauseEdgeId;
  out += std::to_string(e.flat_edge_id);
  out += ", ";
  out += kClauseDestination;
  out += e.destination.str();
  out += ", ";
  out += kClauseType;
  out += e.comm_type;
  out += ", ";
  out += kClauseStart;
  out += std::to_string(e.start_ms);
  out += kMs;
  out += ", ";
  out += kClauseFinish;
  out += std::to_string(e.finish_ms);
  out += kMs;
  return out;
}

LayerEdge parse_layer_edge(std::string_view line) { return layer_edge_from_line(trim(line), 0); }

TextSample encode_tabular_sample(const CallGraph& g, std::uint64_t seed, const AttributeKeep& keep) {
  GraphAttributes a = attributes(g);
  std::vector<std::string> header{"service_id: " + g.service_id.str()};
  if (keep.num_edges) header.push_back("num_edges: " + std::to_string(a.num_edges));
  if (keep.depth) header.push_back("depth: " + std::to_string(a.depth));
  if (keep.latency) header.push_back("latency: " + std::to_string(a.latency_ms));
  Rng header_rng(derive_seed(seed, 0x4EAD));
  header_rng.shuffle(header.begin(), header.end());

  TextSample s;
  s.format = SampleFormat::kTabular;
  s.origin_hash = canonical_hash(g);
  for (const auto& line : header) {
    s.text += line;
    s.text += '\n';
  }
  s.text += kEdgesOpen;
  s.text += '\n';
  for (std::size_t i = 0; i < g.edges.size(); ++i) {
    FeatureOrder order = kDefaultFeatureOrder;
    Rng rng(derive_seed(seed, 0xED6E, i));
    rng.shuffle(order.begin(), order.end());
    s.text += encode_edge_nl(g.edges[i], order);
    s.text += '\n';
  }
  s.text += kEdgesClose;
  s.text += '\n';
  return s;
}

TabularParse parse_tabular_sample_full(std::string_view text) {
  auto lines = split_lines(text);
  TabularParse out;
  std::optional<NodeId> service;
  enum class State { kHeader, kEdges, kDone } state = State::kHeader;
  for (std::size_t i = 0; i < lines.size(); ++i) {
    std::string_view line = trim(lines[i]);
    std::size_t lineno = i + 1;
    if (line.empty()) continue;
    if (state == State::kHeader) {
      if (line == kEdgesOpen) {
        state = State::kEdges;
        continue;
      }
      auto kv = split_header_line(line);
      if (!kv) throw ParseError(ParseErrorCode::kUnexpectedContent, lineno, "", "unexpected line in header");
      std::string name(kv->first);
      if (name == "service_id") {
        if (service || kv->second.empty())
          throw ParseError(ParseErrorCode::kBadHeaderField, lineno, name, "bad service_id");
        service = NodeId(std::string(kv->second));
      } else if (name == "num_edges" || name == "depth" || name == "latency") {
        auto v = parse_int(kv->second);
        if (!v || out.attributes.count(name))
          throw ParseError(ParseErrorCode::kBadHeaderField, lineno, name, "bad header field '" + name + "'");
        out.attributes[name] = *v;
      } else {
        throw ParseError(ParseErrorCode::kBadHeaderField, lineno, name, "unknown header field '" + name + "'");
      }
    } else if (state == State::kEdges) {
      if (line == kEdgesClose) {
        state = State::kDone;
      } else if (line.front() == '<') {
        throw ParseError(ParseErrorCode::kUnclosedBlock, lineno, "", "edges block not closed");
      } else {
        out.graph.edges.push_back(edge_from_line(line, lineno));
      }
    } else {
      throw ParseError(ParseErrorCode::kUnexpectedContent, lineno, "", "content after the edges block");
    }
  }
  if (state == State::kHeader) throw ParseError(ParseErrorCode::kMissingEdgesBlock, 0, "", "no <edges> block");
  if (state == State::kEdges) throw ParseError(ParseErrorCode::kUnclosedBlock, lines.size(), "", "edges block not closed");
  if (!service) throw ParseError(ParseErrorCode::kBadHeaderField, 0, "service_id", "missing service_id");
  out.graph.service_id = *service;
  std::stable_sort(out.graph.edges.begin(), out.graph.edges.end(),
                   [](const Edge& a, const Edge& b) { return a.edge_id < b.edge_id; });
  ValidationReport report = check_structure(out.graph);
  if (!report.empty()) throw StructuralViolation(std::move(report));
  return out;
}

CallGraph parse_tabular_sample(std::string_view text) { return parse_tabular_sample_full(text).graph; }

std::string_view field_name(ConditionField f) noexcept { return kFieldNames[static_cast<std::size_t>(f)]; }

std::string render_conditions(const LayerConditions& c, const HeaderOptions& options) {
  std::vector<ConditionField> fields;
  for (std::size_t i = 0; i < kConditionFieldCount; ++i)
    if (options.keep[i]) fields.push_back(static_cast<ConditionField>(i));
  if (options.shuffle_seed) {
    Rng rng(*options.shuffle_seed);
    rng.shuffle(fields.begin(), fields.end());
  }
  std::string out;
  for (auto f : fields) append_field(out, f, c);
  return out;
}

std::string render_layer_completion(const LayerConditions& c, const std::vector<LayerEdge>& edges,
                                    const std::vector<ChildConditions>& children, bool with_intermediate) {
  std::string out;
  out += kEdgesOpen;
  out += '\n';
  for (const auto& e : edges) {
    out += encode_layer_edge(e);
    out += '\n';
  }
  if (with_intermediate && !edges.empty()) {
    std::int64_t first = edges.front().flat_edge_id;
    std::int64_t last = edges.back().flat_edge_id;
    out += kEdgeCountScratchpad;
    out += std::to_string(last) + " - " + std::to_string(first) + " + 1 = " + std::to_string(last - first + 1);
    out += '\n';
  }
  out += kEdgesClose;
  out += '\n';
  for (const auto& child : children) {
    out += kSubgraphOpen;
    out += '\n';
    if (with_intermediate) {
      out += kDepthScratchpad;
      out += std::to_string(c.remaining_depth - 1);
      out += '\n';
    }
    out += "edge_id: " + std::to_string(child.parent_edge_id) + '\n';
    for (std::size_t i = 1; i < kConditionFieldCount; ++i)
      append_field(out, static_cast<ConditionField>(i), child.conditions);
    out += kSubgraphClose;
    out += '\n';
  }
  return out;
}

TextSample encode_layer(const LayerConditions& c, const std::vector<LayerEdge>& edges,
                        const std::vector<ChildConditions>& children, bool with_intermediate) {
  TextSample s;
  s.format = SampleFormat::kRecursiveLayer;
  s.text = render_conditions(c) + render_layer_completion(c, edges, children, with_intermediate);
  return s;
}

bool PartialConditions::empty() const {
  return !service_id && !start_node && !caller && !remaining_depth && !num_edges && !start_edge_id && !latency_ms &&
         !start_communication_at_ms;
}

std::vector<std::string> PartialConditions::missing_fields() const {
  std::vector<std::string> out;
  auto check = [&](bool present, ConditionField f) {
    if (!present) out.emplace_back(field_name(f));
  };
  check(service_id.has_value(), ConditionField::kServiceId);
  check(start_node.has_value(), ConditionField::kStartNode);
  check(caller.has_value(), ConditionField::kCaller);
  check(remaining_depth.has_value(), ConditionField::kRemainingDepth);
  check(num_edges.has_value(), ConditionField::kNumEdges);
  check(start_edge_id.has_value(), ConditionField::kStartEdgeId);
  check(latency_ms.has_value(), ConditionField::kLatency);
  check(start_communication_at_ms.has_value(), ConditionField::kStartCommunicationAt);
  return out;
}

std::optional<LayerConditions> PartialConditions::complete() const {
  if (!missing_fields().empty()) return std::nullopt;
  return LayerConditions{*start_node, *caller,     *remaining_depth, *num_edges, *start_edge_id,
                         *latency_ms, *start_communication_at_ms, *service_id};
}

ParsedLayer parse_layer_output(std::string_view text, const NodeId& service) {
  auto lines = split_lines(text);
  LayerParser parser(lines, false);
  return parser.parse(service);
}

std::vector<ParsedLayer> parse_layer_sequence(std::string_view text) {
  auto lines = split_lines(text);
  LayerParser parser(lines, true);
  std::vector<ParsedLayer> out;
  NodeId service;
  while (!parser.done()) {
    out.push_back(parser.parse(service));
    if (out.size() == 1 && out.front().header.service_id) service = *out.front().header.service_id;
  }
  if (out.empty()) throw ParseError(ParseErrorCode::kMissingEdgesBlock, 0, "", "no layers");
  return out;
}

PartialConditions parse_header_prefix(std::string_view text) {
  PartialConditions pc;
  auto lines = split_lines(text);
  for (std::size_t i = 0; i < lines.size(); ++i) {
    std::string_view line = trim(lines[i]);
    if (line.empty()) break;
    auto kv = split_header_line(line);
    if (!kv) break;
    auto f = field_by_name(kv->first);
    bool dup = false;
    if (!f || !assign_field(pc, *f, kv->second, dup) || dup)
      throw ParseError(ParseErrorCode::kBadHeaderField, i + 1, std::string(kv->first),
                       "bad header field '" + std::string(kv->first) + "'");
  }
  return pc;
}

LayerConditions parse_conditions(std::string_view text) {
  PartialConditions pc = parse_header_prefix(text);
  auto missing = pc.missing_fields();
  if (!missing.empty())
    throw ParseError(ParseErrorCode::kBadHeaderField, 0, missing.front(), "prompt lacks '" + missing.front() + "'");
  return *pc.complete();
}

}  // namespace tracegen
