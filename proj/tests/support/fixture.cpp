// Copyright 2026 The tracegen Authors
// SPDX-License-Identifier: Apache-2.0

#include "fixture.hpp"

#include <unistd.h>

#include <atomic>
#include <cmath>
#include <fstream>
#include <sstream>

#include "tracegen/assemble.hpp"
#include "tracegen/graph.hpp"
#include "tracegen/rng.hpp"
#include "tracegen/trace_reader.hpp"

namespace tracegen::testing {
namespace {

struct Callee {
  std::size_t ms;
  std::string type;
  std::string alt_type;
};

struct Topology {
  std::vector<std::string> services;
  std::vector<std::string> ms_names;
  std::vector<std::size_t> entry;  // per service
  std::vector<std::vector<Callee>> callees;
};

// Children per edge by level (root = 1).
const std::vector<std::vector<double>> kChildWeights = {
    {0.10, 0.30, 0.30, 0.20, 0.10},
    {0.45, 0.30, 0.15, 0.10},
    {0.60, 0.25, 0.15},
    {0.75, 0.20, 0.05},
    {0.85, 0.15},
    {1.0},
};

const std::vector<std::string> kTypes = {"RPC", "MC", "DB", "MQ"};
const std::vector<double> kTypeWeights = {0.55, 0.2, 0.15, 0.1};

std::string pad(std::uint64_t v, int width) {
  std::string s = std::to_string(v);
  return std::string(static_cast<std::size_t>(width) - s.size(), '0') + s;
}

Topology make_topology(const FixtureOptions& o, Rng& rng) {
  Topology t;
  for (std::size_t i = 0; i < o.services; ++i) t.services.push_back("S_" + pad(100000000 + i * 7919, 9));
  for (std::size_t i = 0; i < o.microservices; ++i) t.ms_names.push_back("MS_" + pad(10000 + i * 37, 5));
  // Zipf-like popularity so a few microservices are heavy hitters.
  std::vector<double> pop;
  for (std::size_t i = 0; i < o.microservices; ++i) pop.push_back(1.0 / std::pow(static_cast<double>(i + 1), 0.8));
  for (std::size_t s = 0; s < o.services; ++s) t.entry.push_back(static_cast<std::size_t>(rng.uniform_int(0, 39)));
  t.callees.resize(o.microservices);
  for (std::size_t m = 0; m < o.microservices; ++m) {
    auto k = rng.uniform_int(2, 6);
    for (std::int64_t j = 0; j < k; ++j) {
      Callee c;
      c.ms = rng.weighted(pop);
      c.type = kTypes[rng.weighted(kTypeWeights)];
      c.alt_type = kTypes[(static_cast<std::size_t>(rng.uniform_int(1, 3)) +
                           static_cast<std::size_t>(std::find(kTypes.begin(), kTypes.end(), c.type) - kTypes.begin())) %
                          kTypes.size()];
      t.callees[m].push_back(c);
    }
  }
  return t;
}

struct Row {
  std::string rpc_id;
  std::string type;
  std::string um;
  std::string dm;
  std::int64_t start = 0;
  std::int64_t rt = 0;
  std::size_t parent = SIZE_MAX;
  std::size_t children = 0;
  bool malformed = false;
};

void grow(const Topology& t, Rng& rng, std::vector<Row>& rows, std::size_t parent_index, std::size_t parent_ms,
          std::size_t level) {
  const auto& weights = kChildWeights[std::min(level, kChildWeights.size()) - 1];
  std::size_t k = rng.weighted(weights);
  // Ids are handed out in random order; ingestion renumbers them.
  std::vector<std::uint32_t> ids;
  for (std::size_t i = 0; i < k; ++i) ids.push_back(static_cast<std::uint32_t>(i + 1));
  rng.shuffle(ids.begin(), ids.end());
  for (std::size_t i = 0; i < k; ++i) {
    const Row p = rows[parent_index];
    const Callee& c = t.callees[parent_ms][rng.weighted(std::vector<double>(t.callees[parent_ms].size(), 1.0))];
    Row r;
    r.rpc_id = p.rpc_id + "." + std::to_string(ids[i]);
    r.type = rng.bernoulli(0.08) ? c.alt_type : c.type;
    r.um = t.ms_names[parent_ms];
    r.dm = t.ms_names[c.ms];
    r.start = p.start + rng.uniform_int(0, p.rt);
    r.rt = rng.uniform_int(0, p.start + p.rt - r.start);
    r.parent = parent_index;
    rows.push_back(r);
    rows[parent_index].children++;
    grow(t, rng, rows, rows.size() - 1, c.ms, level + 1);
  }
}

void emit(std::ostringstream& out, const std::string& trace, const std::string& service, const Row& r) {
  out << r.start << ',' << trace << ',' << service << ',' << r.rpc_id << ',' << r.type << ',' << r.um << ",inst_"
      << (r.um.size() + r.rpc_id.size()) << ",iface_" << r.dm.size() << ',' << r.dm << ",inst_" << r.dm.size();
  if (!r.malformed) out << ',' << r.rt;
  out << '\n';
}

}  // namespace

std::string generate_trace_csv(const FixtureOptions& o, FixtureTally* tally) {
  Rng rng(o.seed);
  Topology t = make_topology(o, rng);
  FixtureTally local;
  std::ostringstream out;
  out << "timestamp,traceid,service,rpc_id,rpctype,um,uminstanceid,interface,dm,dminstanceid,rt\n";

  std::vector<Row> previous;
  std::string previous_service;
  std::int64_t clock = 1000000;
  for (std::size_t i = 0; i < o.traces; ++i) {
    std::string trace = "T_" + pad(i, 7);
    clock += rng.uniform_int(1, 40);
    ++local.traces;

    if (!previous.empty() && rng.bernoulli(o.duplicate_rate)) {
      // Same structure and relative times under a fresh trace id.
      std::int64_t shift = clock - previous.front().start;
      for (Row r : previous) {
        r.start += shift;
        emit(out, trace, previous_service, r);
        ++local.rows;
      }
      ++local.duplicates;
      continue;
    }

    std::size_t s = static_cast<std::size_t>(rng.uniform_int(0, static_cast<std::int64_t>(o.services) - 1));
    std::vector<Row> rows;
    Row root;
    root.rpc_id = "0";
    root.type = "HTTP";
    root.um = "USER";
    root.dm = t.ms_names[t.entry[s]];
    root.start = clock;
    root.rt = static_cast<std::int64_t>(std::exp(std::log(5.0) + rng.uniform01() * (std::log(3000.0) - std::log(5.0))));
    rows.push_back(root);
    grow(t, rng, rows, 0, t.entry[s], 1);

    std::vector<Row> clean = rows;
    bool damaged = false;
    double u = rng.uniform01();
    std::vector<std::size_t> internal;
    std::vector<std::size_t> leaves;
    for (std::size_t j = 1; j < rows.size(); ++j) (rows[j].children ? internal : leaves).push_back(j);
    double edge_cut = o.missing_dm_rate;
    double malformed_cut = edge_cut + o.malformed_rate;
    double time_cut = malformed_cut + o.time_violation_rate;
    double root_cut = time_cut + o.double_root_rate;
    if (u < edge_cut && !internal.empty()) {
      rows[internal[rng.weighted(std::vector<double>(internal.size(), 1.0))]].dm = "UNKNOWN";
      ++local.expected_disconnected;
      damaged = true;
    } else if (u >= edge_cut && u < malformed_cut && !leaves.empty()) {
      rows[leaves[rng.weighted(std::vector<double>(leaves.size(), 1.0))]].malformed = true;
      ++local.malformed_rows;
      damaged = true;
    } else if (u >= malformed_cut && u < time_cut && rows.size() > 1) {
      Row& r = rows[static_cast<std::size_t>(rng.uniform_int(1, static_cast<std::int64_t>(rows.size()) - 1))];
      const Row& p = rows[r.parent];
      r.rt = p.start + p.rt - r.start + 5;
      ++local.expected_time_violations;
      damaged = true;
    } else if (u >= time_cut && u < root_cut) {
      Row extra = rows[0];
      extra.dm = t.ms_names[(t.entry[s] + 1) % t.ms_names.size()];
      rows.push_back(extra);
      ++local.expected_double_roots;
      damaged = true;
    }

    std::vector<std::size_t> order(rows.size());
    for (std::size_t j = 0; j < order.size(); ++j) order[j] = j;
    rng.shuffle(order.begin(), order.end());
    for (std::size_t j : order) {
      emit(out, trace, t.services[s], rows[j]);
      ++local.rows;
    }
    if (!damaged) {
      previous = clean;
      previous_service = t.services[s];
    }
  }
  if (tally) *tally = local;
  return out.str();
}

namespace {

struct FixtureCache {
  TempDir dir;
  std::filesystem::path csv;
  FixtureTally tally;
  std::vector<CallGraph> graphs;

  FixtureCache() {
    csv = dir.path() / "fixture.csv";
    std::ofstream(csv) << generate_trace_csv(FixtureOptions{}, &tally);
    auto reader = TraceReader::open(csv.string(), TraceSchema{});
    auto records = reader.read_all();
    graphs = deduplicate(assemble_graphs(records).graphs);
  }
};

FixtureCache& cache() {
  static FixtureCache c;
  return c;
}

}  // namespace

const std::vector<CallGraph>& fixture_graphs() { return cache().graphs; }
const std::filesystem::path& fixture_csv_path() { return cache().csv; }
const FixtureTally& fixture_tally() { return cache().tally; }

TempDir::TempDir() {
  static std::atomic<int> counter{0};
  path_ = std::filesystem::temp_directory_path() /
          ("tracegen-test-" + std::to_string(::getpid()) + "-" + std::to_string(counter++));
  std::filesystem::create_directories(path_);
}

TempDir::~TempDir() {
  std::error_code ec;
  std::filesystem::remove_all(path_, ec);
}

std::string slurp(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  std::ostringstream os;
  os << in.rdbuf();
  return os.str();
}

Edge edge(const std::string& id, const std::string& src, const std::string& dst, const std::string& type,
          std::int64_t start, std::int64_t finish) {
  return Edge{EdgeId::parse(id), NodeId(src), NodeId(dst), type, start, finish};
}

CallGraph graph_of(std::vector<Edge> edges, const std::string& service, const std::string& trace) {
  return CallGraph{trace, NodeId(service), std::move(edges)};
}

CallGraph chain3() {
  return graph_of({edge("0", "Client", "MS_00001", "RPC", 0, 10), edge("0.1", "MS_00001", "MS_00002", "RPC", 2, 8),
                   edge("0.1.1", "MS_00002", "MS_00003", "DB", 3, 7)});
}

CallGraph star2() {
  return graph_of({edge("0", "Client", "MS_00001", "HTTP", 0, 20), edge("0.1", "MS_00001", "MS_00002", "RPC", 1, 5),
                   edge("0.2", "MS_00001", "MS_00003", "MC", 6, 9)});
}

CallGraph star(std::size_t k) {
  std::vector<Edge> es{edge("0", "Client", "MS_00001", "HTTP", 0, 100)};
  for (std::size_t i = 0; i < k; ++i)
    es.push_back(edge("0." + std::to_string(i + 1), "MS_00001", "MS_" + pad(10 + i, 5), "RPC",
                      static_cast<std::int64_t>(i), static_cast<std::int64_t>(i) + 10));
  return graph_of(std::move(es));
}

CallGraph three_layer_graph() {
  return graph_of({edge("0", "Client", "Front end", "HTTP", 0, 24),
                   edge("0.1", "Front end", "Authentication", "RPC", 1, 5),
                   edge("0.2", "Front end", "Feed", "RPC", 6, 20),
                   edge("0.2.1", "Feed", "Posts", "DB", 7, 12), edge("0.2.2", "Feed", "Media", "MC", 13, 18)},
                  "S_000000042", "fig");
}

}  // namespace tracegen::testing
