// Copyright 2026 The tracegen Authors
// SPDX-License-Identifier: Apache-2.0

#include <doctest.h>
#include <zlib.h>

#include <fstream>
#include <numeric>
#include <set>
#include <sstream>
#include <unordered_set>

#include "fixture.hpp"
#include "oracles.hpp"
#include "tracegen/assemble.hpp"
#include "tracegen/graph.hpp"
#include "tracegen/graph_json.hpp"
#include "tracegen/hash.hpp"
#include "tracegen/stats.hpp"
#include "tracegen/trace_reader.hpp"

using namespace tracegen;
using namespace tracegen::testing;

namespace {

const std::string kThreeRows = std::string(TRACEGEN_TEST_DATA) + "/three_rows.csv";

std::vector<RawEdgeRecord> read_text(const std::string& text, TraceSchema schema = {}) {
  std::istringstream in(text);
  TraceReader reader(in, std::move(schema));
  return reader.read_all();
}

std::vector<RawEdgeRecord> to_records(const CallGraph& g, const std::string& trace) {
  std::vector<RawEdgeRecord> out;
  for (const auto& e : g.edges) {
    RawEdgeRecord r;
    r.trace_id = trace;
    r.rpc_id = e.edge_id.str();
    r.upstream = e.source;
    r.downstream = e.destination;
    r.rpc_type = e.comm_type;
    r.timestamp_ms = double(e.start_ms);
    r.response_time_ms = double(e.duration_ms());
    r.service_id = g.service_id;
    out.push_back(r);
  }
  return out;
}

}  // namespace

TEST_CASE("reader: minimal input and missing cells") {
  auto one = read_text("traceid,rpc_id,um,dm,rpctype,rt,timestamp,service\nT1,0,USER,MS_1,http,5,100,S_1\n");
  REQUIRE(one.size() == 1);
  CHECK(one[0].trace_id == "T1");
  CHECK(one[0].downstream == NodeId("MS_1"));
  CHECK(one[0].response_time_ms == 5.0);

  auto missing = read_text("traceid,rpc_id,um,dm,rpctype,rt,timestamp,service\nT1,0,USER,,http,5,100,S_1\n");
  REQUIRE(missing.size() == 1);
  CHECK_FALSE(missing[0].downstream.has_value());
  auto unknown = read_text("traceid,rpc_id,um,dm,rpctype,rt,timestamp,service\nT1,0,USER,UNKNOWN,http,5,100,S_1\n");
  CHECK_FALSE(unknown[0].downstream.has_value());
}

TEST_CASE("reader: malformed rows are skipped and counted") {
  std::istringstream in("traceid,rpc_id,um,dm,rpctype,rt,timestamp,service\nT1,0,USER,MS_1,http,5,100,S_1\n"
                        "T1,0.1,MS_1\nT1,0.2,MS_1,MS_2,rpc,1,101,S_1,extra\n");
  TraceReader reader(in, TraceSchema{});
  CHECK(reader.read_all().size() == 1);
  CHECK(reader.malformed_rows() == 2);
}

TEST_CASE("reader: tab delimiter, quotes and custom schema") {
  TraceSchema s;
  s.trace_id = "trace";
  s.downstream = "callee";
  auto rows = read_text("trace\trpc_id\tum\tcallee\trpctype\trt\ttimestamp\tservice\nT9\t0\tUSER\tMS_7\trpc\t3\t0\tS_2\n", s);
  REQUIRE(rows.size() == 1);
  CHECK(rows[0].trace_id == "T9");
  CHECK(rows[0].downstream == NodeId("MS_7"));
  CHECK(split_row("a,\"b,c\",d", ',') == std::vector<std::string>{"a", "b,c", "d"});
}

TEST_CASE("three-row fixture file") {
  auto reader = TraceReader::open(kThreeRows, TraceSchema{});
  auto rows = reader.read_all();
  REQUIRE(rows.size() == 3);
  CHECK(rows[0].rpc_id == "0");
  CHECK(rows[0].upstream == NodeId("USER"));
  CHECK(rows[1].rpc_type == std::string("rpc"));
  CHECK(rows[2].downstream == NodeId("MS_00003"));
  CHECK(rows[2].timestamp_ms == 1010.0);
  CHECK(rows[2].service_id == NodeId("S_123456789"));

  auto res = assemble_graphs(rows);
  REQUIRE(res.graphs.size() == 1);
  const CallGraph& g = res.graphs[0];
  CHECK(g.edges[0].source == NodeId::client());
  CHECK(g.edges[0].comm_type == "HTTP");
  CHECK(g.edges[1].start_ms == 2);
  CHECK(attributes(g) == GraphAttributes{NodeId("S_123456789"), 3, 2, 24});
}

TEST_CASE("gzip input") {
  TempDir dir;
  std::string path = dir.file("t.csv.gz");
  std::string text = slurp(kThreeRows);
  gzFile f = gzopen(path.c_str(), "wb");
  REQUIRE(f);
  gzwrite(f, text.data(), static_cast<unsigned>(text.size()));
  gzclose(f);
  CHECK(TraceReader::open(path, TraceSchema{}).read_all().size() == 3);
}

TEST_CASE("assemble: grouping, drops and rejects") {
  CallGraph a = star2();
  CallGraph b = chain3();
  auto ra = to_records(a, "A");
  auto rb = to_records(b, "B");
  std::vector<RawEdgeRecord> mixed;
  for (std::size_t i = 0; i < 3; ++i) {
    mixed.push_back(ra[i]);
    mixed.push_back(rb[i]);
  }
  auto res = assemble_graphs(mixed);
  REQUIRE(res.graphs.size() == 2);
  CHECK(res.graphs[0].trace_id == "A");
  CHECK(canonical_hash(res.graphs[1]) == canonical_hash(b));

  auto broken = to_records(b, "B");
  broken[1].rpc_id = "0.3";  // leaves 0.1.1 without its parent
  auto rej = assemble_graphs(broken);
  CHECK(rej.graphs.empty());
  CHECK(rej.rejects.graphs_by_reason.at("Disconnected") == 1);

  auto missing = to_records(a, "A");
  missing[2].rpc_type.reset();
  auto dropped = assemble_graphs(missing);
  CHECK(dropped.rejects.dropped_records == 1);
  REQUIRE(dropped.graphs.size() == 1);
  CHECK(dropped.graphs[0].edges.size() == 2);

  auto two_edges = to_records(graph_of({edge("0", "USER", "A", "rpc", 50, 60), edge("0.1", "A", "B", "rpc", 51, 55)}), "T");
  auto one = assemble_graphs(two_edges);
  REQUIRE(one.graphs.size() == 1);
  CHECK(one.rejects.rejected_graphs() == 0);
  CHECK(one.graphs[0].edges[0].start_ms == 0);
  CHECK(one.graphs[0].edges[0].source == NodeId::client());
}

TEST_CASE("deduplicate") {
  CallGraph a = chain3();
  CallGraph a2 = a;
  a2.trace_id = "other";
  CallGraph c = a;
  c.edges[2].finish_ms += 1;
  std::vector<CallGraph> gs{a, a2, c};
  auto out = deduplicate(gs);
  REQUIRE(out.size() == 2);
  CHECK(out[0].trace_id == a.trace_id);
  CHECK(deduplicate(std::vector<CallGraph>{}).empty());
}

TEST_CASE("fixture corpus ingestion") {
  const auto& gs = fixture_graphs();
  const auto& tally = fixture_tally();
  MESSAGE("fixture: " << tally.traces << " traces, " << tally.rows << " rows, " << gs.size() << " graphs");
  CHECK(gs.size() >= 10000);

  auto reader = TraceReader::open(fixture_csv_path().string(), TraceSchema{});
  auto records = reader.read_all();
  CHECK(reader.malformed_rows() == tally.malformed_rows);
  auto res = assemble_graphs(records);
  CHECK(res.rejects.graphs_by_reason["Disconnected"] == tally.expected_disconnected);
  CHECK(res.rejects.graphs_by_reason["TimeNestingViolation"] == tally.expected_time_violations);
  CHECK(res.rejects.graphs_by_reason["MultipleRoots"] == tally.expected_double_roots);
  CHECK(res.graphs.size() + res.rejects.rejected_graphs() == tally.traces);
  CHECK(res.graphs.size() - gs.size() >= tally.duplicates);

  // Distinct hashes after dedup.
  std::unordered_set<Digest> hashes;
  for (const auto& g : gs) hashes.insert(canonical_hash(g));
  CHECK(hashes.size() == gs.size());

  // Re-assembling serialized graphs yields the same set.
  std::vector<RawEdgeRecord> again;
  for (std::size_t i = 0; i < gs.size(); ++i) {
    auto r = to_records(gs[i], "R" + std::to_string(i));
    again.insert(again.end(), r.begin(), r.end());
  }
  auto res2 = assemble_graphs(again);
  REQUIRE(res2.graphs.size() == gs.size());
  for (std::size_t i = 0; i < gs.size(); ++i) CHECK(canonical_hash(res2.graphs[i]) == canonical_hash(gs[i]));
}

TEST_CASE("graph JSON lines round trip") {
  const auto& gs = fixture_graphs();
  std::vector<CallGraph> some(gs.begin(), gs.begin() + 200);
  std::stringstream ss;
  write_graphs_jsonl(ss, some);
  auto first = nlohmann::json::parse(ss.str().substr(0, ss.str().find('\n')));
  std::vector<std::string> keys;
  for (auto it = first.begin(); it != first.end(); ++it) keys.push_back(it.key());
  CHECK(std::set<std::string>(keys.begin(), keys.end()) == std::set<std::string>{"trace_id", "service_id", "edges"});
  auto back = read_graphs_jsonl(ss);
  CHECK(back == some);
  std::istringstream bad("{\"trace_id\": 1}\n");
  CHECK_THROWS(read_graphs_jsonl(bad));
}

TEST_CASE("stats: p90, call frequencies, child counts") {
  std::vector<std::int64_t> lat(100);
  std::iota(lat.begin(), lat.end(), 1);
  CHECK(nearest_rank_percentile(lat, 90) == 90);
  CHECK(nearest_rank_percentile({42}, 90) == 42);
  CHECK_THROWS_AS(nearest_rank_percentile({}, 90), std::invalid_argument);

  CallGraph single = graph_of({edge("0", "A", "B", "RPC", 0, 3)});
  CorpusStats s1 = compute_stats(std::vector<CallGraph>{single});
  CHECK(s1.call_freq.size() == 1);
  CHECK(s1.call_freq.at({NodeId("A"), NodeId("B"), "RPC"}) == 1);

  // Root edges with 1, 1 and 2 children.
  std::vector<CallGraph> three{chain3(), chain3(), star2()};
  three[1].edges[2].finish_ms = 6;
  CorpusStats s3 = compute_stats(three);
  auto level1 = normalize(s3.child_count_dist.at(1));
  CHECK(level1.size() == 2);
  CHECK(level1.at(1) == doctest::Approx(2.0 / 3).epsilon(1e-12));
  CHECK(level1.at(2) == doctest::Approx(1.0 / 3).epsilon(1e-12));
  CHECK_THROWS_AS(compute_stats(std::vector<CallGraph>{}), EmptyCorpusError);
}

TEST_CASE("stats over fixture: totals, p90 oracle, normalization, shard merge") {
  const auto& gs = fixture_graphs();
  CorpusStats s = compute_stats(gs);
  std::uint64_t edges = 0;
  for (const auto& g : gs) edges += g.edges.size();
  std::uint64_t calls = 0;
  for (const auto& [_, n] : s.call_freq) calls += n;
  CHECK(calls == edges);
  CHECK(s.total_graphs == gs.size());

  std::map<NodeId, std::vector<std::int64_t>> lat;
  for (const auto& g : gs) lat[g.service_id].push_back(attributes(g).latency_ms);
  for (const auto& [svc, v] : lat) CHECK(s.per_service_p90_latency.at(svc) == p90_oracle(v));

  auto sum = [](const auto& m) {
    double t = 0;
    for (const auto& [_, p] : m) t += p;
    return t;
  };
  CHECK(sum(normalize(s.comm_type_dist)) == doctest::Approx(1.0).epsilon(1e-9));
  for (const auto& [_, d] : s.child_count_dist) CHECK(sum(normalize(d)) == doctest::Approx(1.0).epsilon(1e-9));
  for (const auto& [_, d] : s.response_time_dist) CHECK(sum(normalize(d)) == doctest::Approx(1.0).epsilon(1e-9));

  StatsAccumulator a, b;
  for (std::size_t i = 0; i < gs.size(); ++i) (i % 3 ? a : b).add(gs[i]);
  a.merge(b);
  CorpusStats merged = a.finalize();
  CHECK(to_json(merged).dump() == to_json(s).dump());
  CHECK(to_json(stats_from_json(to_json(s))).dump() == to_json(s).dump());
}

TEST_CASE("uncommon calls are below a tenth of the service's edges") {
  const auto& gs = fixture_graphs();
  CorpusStats s = compute_stats(gs);
  std::size_t uncommon = 0;
  for (const auto& [svc, calls] : s.per_service_call_freq)
    for (const auto& [call, n] : calls) {
      bool expect = double(n) < 0.1 * double(s.service_edges(svc));
      CHECK(s.is_uncommon(svc, call) == expect);
      uncommon += expect;
    }
  CHECK(uncommon > 0);
}
