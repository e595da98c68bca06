// Copyright 2026 The tracegen Authors
// SPDX-License-Identifier: Apache-2.0

#include <doctest.h>

#include <fstream>

#include "cli.hpp"
#include "fixture.hpp"
#include "tracegen/graph.hpp"
#include "tracegen/graph_json.hpp"
#include "tracegen/hash.hpp"
#include "tracegen/layers.hpp"
#include "tracegen/codec.hpp"

using namespace tracegen;
using namespace tracegen::testing;

namespace {

const std::string kData = TRACEGEN_TEST_DATA;

int tg(std::vector<std::string> args) {
  args.insert(args.begin(), {"tracegen", "--quiet"});
  return cli::run(args);
}

void write_file(const std::string& path, const std::string& text) {
  std::ofstream(path, std::ios::binary) << text;
}

std::vector<Json> jsonl(const std::string& path) {
  std::vector<Json> out;
  std::ifstream in(path);
  for (std::string line; std::getline(in, line);)
    if (!line.empty()) out.push_back(Json::parse(line));
  return out;
}

// A small real corpus written once per test binary.
const std::string& corpus_dir() {
  static TempDir dir;
  static bool ready = [] {
    const auto& gs = fixture_graphs();
    write_graphs_jsonl(dir.file("graphs.jsonl"), std::span<const CallGraph>(gs.data(), 400));
    return tg({"stats", "--graphs", dir.file("graphs.jsonl"), "--out", dir.file("stats.json")}) == 0;
  }();
  REQUIRE(ready);
  static const std::string path = dir.file("");
  return path;
}

}  // namespace

TEST_CASE("ingest a three-row table") {
  TempDir dir;
  std::string out = dir.file("g.jsonl");
  REQUIRE(tg({"ingest", "--in", kData + "/three_rows.csv", "--out", out}) == cli::kExitOk);
  auto gs = read_graphs_jsonl(out);
  REQUIRE(gs.size() == 1);
  CHECK(gs[0].edges.size() == 3);
  CHECK(attributes(gs[0]).depth == 2);
  CHECK(attributes(gs[0]).latency_ms == 24);

  Json rejects = read_json_file(out + ".rejects.json");
  CHECK(rejects.is_object());
  Json manifest = read_json_file(out + ".manifest.json");
  CHECK(manifest["command"] == "ingest");
  CHECK(manifest["inputs"][0]["sha256"] == sha256(slurp(kData + "/three_rows.csv")).hex());
  CHECK(manifest["outputs"].size() == 2);
}

TEST_CASE("ingest the fixture matches the library") {
  TempDir dir;
  std::string out = dir.file("g.jsonl");
  REQUIRE(tg({"ingest", "--in", fixture_csv_path(), "--out", out, "-j", "2"}) == 0);
  auto gs = read_graphs_jsonl(out);
  REQUIRE(gs.size() == fixture_graphs().size());
  for (std::size_t i = 0; i < gs.size(); i += 97) CHECK(canonical_hash(gs[i]) == canonical_hash(fixture_graphs()[i]));
}

TEST_CASE("generate with replay reproduces graphs and validates") {
  const std::string& d = corpus_dir();
  TempDir dir;
  std::string out = dir.file("gen.jsonl");
  REQUIRE(tg({"generate", "--backend", "replay", "--prompts-from", d + "graphs.jsonl", "--out", out}) == 0);
  auto gen = read_graphs_jsonl(out);
  auto src = read_graphs_jsonl(d + "graphs.jsonl");
  REQUIRE(gen.size() == src.size());
  for (std::size_t i = 0; i < gen.size(); ++i) CHECK(canonical_hash(gen[i]) == canonical_hash(src[i]));
  auto sessions = jsonl(out + ".sessions.jsonl");
  CHECK(sessions.size() == src.size());

  std::string verdicts = dir.file("v.jsonl");
  REQUIRE(tg({"validate", "--graphs", out, "--out", verdicts}) == 0);
  for (const auto& v : jsonl(verdicts)) CHECK(v["valid"] == true);
}

TEST_CASE("validate layer outputs") {
  TempDir dir;
  CallGraph g = three_layer_graph();
  std::string text;
  for (const auto& l : decompose_layers(g)) {
    text += Json{{"conditions", to_json(l.conditions)},
                 {"text", render_layer_completion(l.conditions, l.edges, l.children, true)}}
                .dump() +
            '\n';
  }
  text += Json{{"conditions", to_json(decompose_layers(g)[0].conditions)}, {"text", "<edges>\n</edges>\n"}}.dump() + '\n';
  write_file(dir.file("layers.jsonl"), text);
  REQUIRE(tg({"validate", "--layers", dir.file("layers.jsonl"), "--out", dir.file("v.jsonl")}) == 0);
  auto v = jsonl(dir.file("v.jsonl"));
  REQUIRE(v.size() == 4);
  CHECK(v[0]["valid"] == true);
  CHECK(v[2]["valid"] == true);
  CHECK(v[3]["valid"] == false);
  CHECK(v[3]["violations"][0]["code"] == "E_COUNT");
}

TEST_CASE("evaluate a corpus against itself") {
  const std::string& d = corpus_dir();
  TempDir dir;
  std::string out = dir.file("report.json");
  REQUIRE(tg({"evaluate", "--real", d + "graphs.jsonl", "--syn", d + "graphs.jsonl", "--out", out, "--k", "5,10"}) == 0);
  Json r = read_json_file(out);
  CHECK(std::abs(r["kl_popular_calls"].get<double>()) < 1e-9);
  CHECK(r["emd_response_time"] == 0.0);
  CHECK(r["emd_in_degree"] == 0.0);
  CHECK(r["emd_out_degree"] == 0.0);
  CHECK(r["heavy_hitter"]["5"] == 1.0);
  CHECK(r["heavy_hitter"]["10"] == 1.0);
  CHECK(r["memorization_rate"] == 1.0);
}

TEST_CASE("corpus and generate outputs are reproducible") {
  const std::string& d = corpus_dir();
  TempDir dir;
  for (const std::string kind : {"pretrain", "instruction", "tabular"}) {
    CAPTURE(kind);
    REQUIRE(tg({"corpus", kind, "--graphs", d + "graphs.jsonl", "--out", dir.file("a.jsonl"), "--seed", "4"}) == 0);
    REQUIRE(tg({"-j", "3", "corpus", kind, "--graphs", d + "graphs.jsonl", "--out", dir.file("b.jsonl"), "--seed", "4"}) ==
            0);
    CHECK(slurp(dir.file("a.jsonl")) == slurp(dir.file("b.jsonl")));
    CHECK(Json::parse(slurp(dir.file("a.jsonl")).substr(0, slurp(dir.file("a.jsonl")).find('\n')))["kind"] == kind);
  }
  for (const char* name : {"x", "y"}) {
    std::string out = dir.file(std::string(name) + ".jsonl");
    REQUIRE(tg({"generate", "--backend", "statistical", "--stats", d + "stats.json", "--prompts-from", d + "graphs.jsonl",
                "--out", out, "--seed", "9"}) == 0);
  }
  CHECK(slurp(dir.file("x.jsonl")) == slurp(dir.file("y.jsonl")));
  CHECK(slurp(dir.file("x.jsonl.sessions.jsonl")) == slurp(dir.file("y.jsonl.sessions.jsonl")));
  CHECK_FALSE(read_graphs_jsonl(dir.file("x.jsonl")).empty());
}

TEST_CASE("baseline and accuracy grid commands") {
  const std::string& d = corpus_dir();
  TempDir dir;
  REQUIRE(tg({"baseline", "--stats", d + "stats.json", "--out", dir.file("b.jsonl"), "--count", "50"}) == 0);
  auto gs = read_graphs_jsonl(dir.file("b.jsonl"));
  CHECK(gs.size() == 50);
  for (const auto& g : gs) CHECK(check_structure(g).empty());

  REQUIRE(tg({"accuracy-grid", "--backend", "statistical", "--stats", d + "stats.json", "--out", dir.file("grid.json"),
              "--max-edges", "3", "--max-depth", "2", "--samples", "4"}) == 0);
  Json grid = read_json_file(dir.file("grid.json"));
  CHECK(grid.dump().find("num_edges") != std::string::npos);
  CHECK(slurp(dir.file("grid.json.csv")).size() > 0);
}

TEST_CASE("exit codes") {
  TempDir dir;
  CHECK(tg({"--help"}) == cli::kExitOk);
  CHECK(tg({"ingest", "--help"}) == cli::kExitOk);
  CHECK(tg({}) == cli::kExitUsage);
  CHECK(tg({"frobnicate"}) == cli::kExitUsage);
  CHECK(tg({"ingest", "--out", dir.file("x")}) == cli::kExitUsage);
  CHECK(tg({"ingest", "--in", kData + "/three_rows.csv", "--out", dir.file("x"), "--bogus"}) == cli::kExitUsage);
  CHECK(tg({"validate", "--out", dir.file("x")}) == cli::kExitUsage);

  write_file(dir.file("broken.jsonl"), "{\"trace_id\": 3\n");
  CHECK(tg({"stats", "--graphs", dir.file("broken.jsonl"), "--out", dir.file("s.json")}) == cli::kExitInvalidInput);

  write_graphs_jsonl(dir.file("one.jsonl"), std::vector<CallGraph>{three_layer_graph()});
  CHECK(tg({"generate", "--backend", "http", "--url", "http://127.0.0.1:1/v1/complete", "--http-retries", "0",
            "--prompts-from", dir.file("one.jsonl"), "--out", dir.file("gen.jsonl")}) == cli::kExitBackend);
  CHECK(tg({"generate", "--backend", "http", "--prompts-from", dir.file("one.jsonl"), "--out", dir.file("gen.jsonl")}) ==
        cli::kExitUsage);
}

TEST_CASE("config files supply defaults and flags win") {
  const std::string& d = corpus_dir();
  TempDir dir;
  write_file(dir.file("cfg.json"), R"({"quiet": true, "corpus": {"p-drop": 1.0, "seed": 3}})");
  REQUIRE(tg({"--config", dir.file("cfg.json"), "corpus", "pretrain", "--graphs", d + "graphs.jsonl", "--out",
              dir.file("a.jsonl")}) == 0);
  Json header = Json::parse(slurp(dir.file("a.jsonl")).substr(0, slurp(dir.file("a.jsonl")).find('\n')));
  CHECK(header["p_drop"] == 1.0);
  CHECK(header["seed"] == 3);

  REQUIRE(tg({"--config", dir.file("cfg.json"), "corpus", "pretrain", "--graphs", d + "graphs.jsonl", "--out",
              dir.file("b.jsonl"), "--p-drop", "0.25"}) == 0);
  header = Json::parse(slurp(dir.file("b.jsonl")).substr(0, slurp(dir.file("b.jsonl")).find('\n')));
  CHECK(header["p_drop"] == 0.25);
  CHECK(header["seed"] == 3);
  Json manifest = read_json_file(dir.file("b.jsonl") + ".manifest.json");
  CHECK(manifest["config"]["corpus"]["p-drop"] == "0.25");

  write_file(dir.file("bad.json"), "[1, 2]");
  CHECK(tg({"--config", dir.file("bad.json"), "stats", "--graphs", d + "graphs.jsonl", "--out", dir.file("s.json")}) ==
        cli::kExitUsage);
}
