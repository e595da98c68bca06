// Copyright 2026 The tracegen Authors
// SPDX-License-Identifier: Apache-2.0

#include "tracegen/graph_json.hpp"

#include <fstream>
#include <stdexcept>

namespace tracegen {
namespace {

template <typename K, typename F>
Json counts_to_json(const Counts<K>& counts, F key) {
  Json out = Json::object();
  for (const auto& [k, n] : counts) out[key(k)] = n;
  return out;
}

std::ifstream open_in(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open '" + path + "'");
  return in;
}

std::ofstream open_out(const std::string& path) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw std::runtime_error("cannot write '" + path + "'");
  return out;
}

}  // namespace

Json to_json(const CallGraph& g) {
  Json edges = Json::array();
  for (const auto& e : g.edges) {
    edges.push_back(Json{{"edge_id", e.edge_id.str()},
                         {"source", e.source.str()},
                         {"destination", e.destination.str()},
                         {"comm_type", e.comm_type},
                         {"start_ms", e.start_ms},
                         {"finish_ms", e.finish_ms}});
  }
  return Json{{"trace_id", g.trace_id}, {"service_id", g.service_id.str()}, {"edges", std::move(edges)}};
}

CallGraph graph_from_json(const Json& j) {
  CallGraph g;
  g.trace_id = j.at("trace_id").get<std::string>();
  g.service_id = NodeId(j.at("service_id").get<std::string>());
  for (const auto& e : j.at("edges")) {
    g.edges.push_back(Edge{EdgeId::parse(e.at("edge_id").get<std::string>()),
                           NodeId(e.at("source").get<std::string>()),
                           NodeId(e.at("destination").get<std::string>()), e.at("comm_type").get<std::string>(),
                           e.at("start_ms").get<std::int64_t>(), e.at("finish_ms").get<std::int64_t>()});
  }
  return g;
}

Json to_json(const LayerConditions& c) {
  return Json{{"service_id", c.service_id.str()},
              {"start_node", c.start_node.str()},
              {"caller", c.caller.str()},
              {"remaining_depth", c.remaining_depth},
              {"num_edges", c.num_edges},
              {"start_edge_id", c.start_edge_id},
              {"latency", c.latency_ms},
              {"start_communication_at", c.start_communication_at_ms}};
}

LayerConditions conditions_from_json(const Json& j) {
  LayerConditions c;
  c.service_id = NodeId(j.at("service_id").get<std::string>());
  c.start_node = NodeId(j.value("start_node", std::string("Client")));
  c.caller = NodeId(j.value("caller", std::string("None")));
  c.remaining_depth = j.at("remaining_depth").get<std::int64_t>();
  c.num_edges = j.at("num_edges").get<std::int64_t>();
  c.start_edge_id = j.value("start_edge_id", std::int64_t{0});
  c.latency_ms = j.at("latency").get<std::int64_t>();
  c.start_communication_at_ms = j.value("start_communication_at", std::int64_t{0});
  return c;
}

Json to_json(const Violation& v) {
  Json j{{"code", std::string(to_string(v.code))}, {"detail", v.detail}};
  j["location"] = v.location ? Json(*v.location) : Json(nullptr);
  return j;
}

Json to_json(const ValidationReport& report) {
  Json out = Json::array();
  for (const auto& v : report) out.push_back(to_json(v));
  return out;
}

Json to_json(const RejectSummary& r) {
  Json reasons = Json::object();
  for (const auto& [k, n] : r.graphs_by_reason) reasons[k] = n;
  return Json{{"rejected_graphs", r.rejected_graphs()},
              {"graphs_by_reason", std::move(reasons)},
              {"dropped_records", r.dropped_records},
              {"malformed_rows", r.malformed_rows}};
}

Json to_json(const CorpusStats& s) {
  auto node = [](const NodeId& n) { return n.str(); };
  auto integer = [](std::int64_t v) { return std::to_string(v); };
  auto text = [](const std::string& v) { return v; };

  Json calls = Json::array();
  for (const auto& [t, n] : s.call_freq)
    calls.push_back(Json{{"source", t.source.str()}, {"destination", t.destination.str()},
                         {"comm_type", t.comm_type}, {"count", n}});
  Json p90 = Json::object();
  for (const auto& [k, v] : s.per_service_p90_latency) p90[k.str()] = v;
  Json per_service = Json::object();
  for (const auto& [svc, counts] : s.per_service_call_freq) {
    Json arr = Json::array();
    for (const auto& [t, n] : counts)
      arr.push_back(Json{{"source", t.source.str()}, {"destination", t.destination.str()},
                         {"comm_type", t.comm_type}, {"count", n}});
    per_service[svc.str()] = std::move(arr);
  }
  Json child = Json::object();
  for (const auto& [level, counts] : s.child_count_dist) child[std::to_string(level)] = counts_to_json(counts, integer);
  Json types_by_level = Json::object();
  for (const auto& [level, counts] : s.comm_type_by_level)
    types_by_level[std::to_string(level)] = counts_to_json(counts, text);
  Json rt = Json::object();
  for (const auto& [type, counts] : s.response_time_dist) rt[type] = counts_to_json(counts, integer);
  Json dest = Json::array();
  for (const auto& [key, counts] : s.destination_freq)
    dest.push_back(Json{{"source", key.first.str()}, {"comm_type", key.second},
                        {"destinations", counts_to_json(counts, node)}});

  return Json{{"total_graphs", s.total_graphs},
              {"total_edges", s.total_edges},
              {"call_freq", std::move(calls)},
              {"per_service_p90_latency", std::move(p90)},
              {"graphs_per_service", counts_to_json(s.graphs_per_service, node)},
              {"per_service_call_freq", std::move(per_service)},
              {"child_count_dist", std::move(child)},
              {"comm_type_dist", counts_to_json(s.comm_type_dist, text)},
              {"comm_type_by_level", std::move(types_by_level)},
              {"response_time_dist", std::move(rt)},
              {"destination_freq", std::move(dest)}};
}

CorpusStats stats_from_json(const Json& j) {
  CorpusStats s;
  auto triple = [](const Json& e) {
    return CallTriple{NodeId(e.at("source").get<std::string>()), NodeId(e.at("destination").get<std::string>()),
                      e.at("comm_type").get<std::string>()};
  };
  s.total_graphs = j.at("total_graphs").get<std::uint64_t>();
  s.total_edges = j.at("total_edges").get<std::uint64_t>();
  for (const auto& e : j.at("call_freq")) s.call_freq[triple(e)] = e.at("count").get<std::uint64_t>();
  for (const auto& [k, v] : j.at("per_service_p90_latency").items()) s.per_service_p90_latency[NodeId(k)] = v.get<std::int64_t>();
  for (const auto& [k, v] : j.at("graphs_per_service").items()) s.graphs_per_service[NodeId(k)] = v.get<std::uint64_t>();
  for (const auto& [k, arr] : j.at("per_service_call_freq").items())
    for (const auto& e : arr) s.per_service_call_freq[NodeId(k)][triple(e)] = e.at("count").get<std::uint64_t>();
  for (const auto& [level, counts] : j.at("child_count_dist").items())
    for (const auto& [c, n] : counts.items())
      s.child_count_dist[std::stoll(level)][std::stoll(c)] = n.get<std::uint64_t>();
  for (const auto& [k, v] : j.at("comm_type_dist").items()) s.comm_type_dist[k] = v.get<std::uint64_t>();
  for (const auto& [level, counts] : j.at("comm_type_by_level").items())
    for (const auto& [t, n] : counts.items()) s.comm_type_by_level[std::stoll(level)][t] = n.get<std::uint64_t>();
  for (const auto& [type, counts] : j.at("response_time_dist").items())
    for (const auto& [d, n] : counts.items()) s.response_time_dist[type][std::stoll(d)] = n.get<std::uint64_t>();
  for (const auto& e : j.at("destination_freq")) {
    auto& counts = s.destination_freq[{NodeId(e.at("source").get<std::string>()), e.at("comm_type").get<std::string>()}];
    for (const auto& [d, n] : e.at("destinations").items()) counts[NodeId(d)] = n.get<std::uint64_t>();
  }
  return s;
}

std::vector<CallGraph> read_graphs_jsonl(std::istream& in) {
  std::vector<CallGraph> out;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    try {
      out.push_back(graph_from_json(Json::parse(line)));
    } catch (const std::exception& e) {
      throw std::runtime_error("graph line " + std::to_string(lineno) + ": " + e.what());
    }
  }
  return out;
}

std::vector<CallGraph> read_graphs_jsonl(const std::string& path) {
  auto in = open_in(path);
  return read_graphs_jsonl(in);
}

void write_graphs_jsonl(std::ostream& out, std::span<const CallGraph> graphs) {
  for (const auto& g : graphs) out << to_json(g).dump() << '\n';
}

void write_graphs_jsonl(const std::string& path, std::span<const CallGraph> graphs) {
  auto out = open_out(path);
  write_graphs_jsonl(out, graphs);
}

std::vector<Json> read_jsonl(const std::string& path) {
  auto in = open_in(path);
  std::vector<Json> out;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    try {
      out.push_back(Json::parse(line));
    } catch (const std::exception& e) {
      throw std::runtime_error(path + ":" + std::to_string(lineno) + ": " + e.what());
    }
  }
  return out;
}

Json read_json_file(const std::string& path) {
  auto in = open_in(path);
  try {
    return Json::parse(in);
  } catch (const std::exception& e) {
    throw std::runtime_error(path + ": " + e.what());
  }
}

void write_json_file(const std::string& path, const Json& j) {
  auto out = open_out(path);
  out << j.dump(2) << '\n';
}

}  // namespace tracegen
