// Copyright 2026 The tracegen Authors
// SPDX-License-Identifier: Apache-2.0

// Acceptance run: one PASS/FAIL line per criterion, nonzero exit on any FAIL.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <functional>
#include <iostream>
#include <map>
#include <set>
#include <sstream>
#include <string>

#include "cli.hpp"
#include "fixture.hpp"
#include "mutations.hpp"
#include "oracles.hpp"
#include "tracegen/accuracy_grid.hpp"
#include "tracegen/codec.hpp"
#include "tracegen/corpus.hpp"
#include "tracegen/driver.hpp"
#include "tracegen/graph.hpp"
#include "tracegen/graph_json.hpp"
#include "tracegen/hash.hpp"
#include "tracegen/layers.hpp"
#include "tracegen/metrics.hpp"
#include "tracegen/probabilistic.hpp"
#include "tracegen/replay_backend.hpp"
#include "tracegen/rng.hpp"
#include "tracegen/statistical_backend.hpp"
#include "tracegen/stats.hpp"
#include "tracegen/validator.hpp"

using namespace tracegen;
using namespace tracegen::testing;

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

struct Outcome {
  bool pass = false;
  std::string detail;
};

std::string fmt(const char* f, double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, f, v);
  return buf;
}

const CorpusStats& fixture_stats() {
  static const CorpusStats s = compute_stats(fixture_graphs());
  return s;
}

std::span<const CallGraph> first_n(std::size_t n) {
  const auto& gs = fixture_graphs();
  return {gs.data(), std::min(n, gs.size())};
}

Outcome validator_soundness() {
  auto t0 = Clock::now();
  std::size_t layers = 0, flagged = 0;
  for (const auto& g : fixture_graphs())
    for (const auto& l : decompose_layers(g)) {
      ++layers;
      if (!validate_layer(l.edges, l.children, l.conditions).empty()) ++flagged;
    }
  double secs = seconds_since(t0);
  return {layers >= 10000 && flagged == 0 && secs < 60,
          std::to_string(layers) + " real layers, " + std::to_string(flagged) + " flagged, " + fmt("%.2f s", secs)};
}

Outcome validator_completeness() {
  std::set<ViolationCode> covered;
  std::size_t exact = 0, total = 0;
  for (const auto& m : mutation_suite()) {
    ++total;
    ValidationReport r = validate_layer_text(m.text, m.conditions);
    std::set<ViolationCode> got;
    for (const auto& v : r) got.insert(v.code);
    if (got == std::set<ViolationCode>{m.expected}) {
      ++exact;
      covered.insert(m.expected);
    } else {
      std::cerr << "  mutation '" << m.name << "' expected " << to_string(m.expected) << ", got";
      for (auto c : got) std::cerr << ' ' << to_string(c);
      std::cerr << '\n';
    }
  }
  const std::size_t catalog = layer_violation_catalog().size();
  return {exact == total && covered.size() == catalog && catalog == 15,
          std::to_string(exact) + "/" + std::to_string(total) + " mutations exact, " + std::to_string(covered.size()) +
              "/" + std::to_string(catalog) + " codes covered"};
}

Outcome codec_round_trip() {
  auto graphs = first_n(10000);
  std::size_t failures = 0, checks = 0;
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    for (std::size_t i = 0; i < graphs.size(); ++i) {
      const Digest want = canonical_hash(graphs[i]);
      const std::uint64_t s = derive_seed(seed, i);
      try {
        checks += 2;
        if (canonical_hash(parse_tabular_sample(encode_tabular_sample(graphs[i], s).text)) != want) ++failures;
        if (canonical_hash(reconstruct_pretraining_sample(pretraining_sample(graphs[i], 0.5, s).text)) != want) ++failures;
      } catch (const std::exception&) {
        ++failures;
      }
    }
  }
  return {graphs.size() == 10000 && failures == 0,
          std::to_string(graphs.size()) + " graphs x 10 seeds x 2 formats, " + std::to_string(failures) + " of " +
              std::to_string(checks) + " failed"};
}

Outcome replay_factorization() {
  // Every ingested fixture graph is replayed.
  const auto& gs = fixture_graphs();
  std::size_t ok = 0;
  for (const auto& g : gs) {
    ReplayBackend replay(g);
    auto r = recursive_generate(replay, graph_prompt(g), {});
    if (r.ok() && canonical_hash(*r.graph) == canonical_hash(g)) ++ok;
  }
  return {ok == gs.size(), std::to_string(ok) + "/" + std::to_string(gs.size()) + " graphs reproduced exactly"};
}

Outcome statistical_grid() {
  auto t0 = Clock::now();
  const CorpusStats& stats = fixture_stats();
  NodeId service;
  std::uint64_t best = 0;
  for (const auto& [s, n] : stats.graphs_per_service)
    if (n > best) {
      best = n;
      service = s;
    }
  std::int64_t latency = stats.per_service_p90_latency.at(service);

  auto backend = std::make_shared<StatisticalBackend>(fit_probabilistic(stats));
  BackendFactory factory = [&](const LayerConditions&, std::int64_t, std::int64_t, std::size_t) { return backend; };
  GridOptions o;
  o.min_edges = 1;
  o.max_edges = 10;
  o.min_depth = 1;
  o.max_depth = 4;
  o.samples_per_cell = 20;
  o.limits.max_retries = 0;
  o.seed = 2024;
  AccuracyGrid grid = accuracy_grid(factory, fixed_prompt_factory(service, latency), o);
  double secs = seconds_since(t0);

  double worst_feasible = 1.0, best_infeasible = 0.0;
  std::size_t feasible = 0, valid = 0, samples = 0, unsat_spec_feasible = 0;
  for (const auto& c : grid.cells) {
    if (c.satisfiable) {
      ++feasible;
      worst_feasible = std::min(worst_feasible, c.fraction);
      valid += c.valid;
      samples += c.samples;
    } else {
      best_infeasible = std::max(best_infeasible, c.fraction);
      if (c.num_edges >= c.depth) ++unsat_spec_feasible;
    }
  }
  double overall = samples ? double(valid) / double(samples) : 0;
  bool pass = feasible > 0 && worst_feasible >= 0.95 && best_infeasible == 0.0 && secs < 300;
  return {pass, std::to_string(feasible) + " satisfiable cells, pass rate " + fmt("%.4f", overall) + " (worst cell " +
                    fmt("%.2f", worst_feasible) + "); unsatisfiable cells max " + fmt("%.2f", best_infeasible) +
                    " (includes " + std::to_string(unsat_spec_feasible) +
                    " depth-1 cells with more than one edge, which no graph can have); " + fmt("%.1f s", secs)};
}

Outcome probabilistic_baseline() {
  const ProbModel model = fit_probabilistic(fixture_stats());
  std::vector<CallGraph> samples;
  samples.reserve(10000);
  std::size_t bad = 0;
  for (std::uint64_t i = 0; i < 10000; ++i) {
    samples.push_back(sample_probabilistic(model, NodeId::client(), derive_seed(31, i)));
    if (!check_structure(samples.back()).empty()) ++bad;
  }
  const auto& real = fixture_graphs();
  double emd_children = emd_normalized(child_count_samples(samples), child_count_samples(real));

  std::map<std::string, double> index;
  for (const auto& [type, _] : fixture_stats().comm_type_dist) index.emplace(type, double(index.size()));
  auto type_samples = [&](std::span<const CallGraph> gs) {
    std::vector<double> out;
    for (const auto& g : gs)
      for (const auto& e : g.edges) {
        auto it = index.find(e.comm_type);
        out.push_back(it == index.end() ? -1.0 : it->second);
      }
    return out;
  };
  double emd_types = emd_normalized(type_samples(samples), type_samples(real));
  return {bad == 0 && emd_children <= 0.02 && emd_types <= 0.02,
          std::to_string(10000 - bad) + "/10000 structurally valid, child-count EMD " + fmt("%.4f", emd_children) +
              ", comm-type EMD " + fmt("%.4f", emd_types)};
}

Outcome metric_oracles() {
  const auto& gs = fixture_graphs();
  double kl_self = kl_popular_calls(gs, gs);
  std::vector<double> rt = response_time_samples(gs);
  double emd_self = emd_normalized(rt, rt);

  Counts<CallTriple> p{{CallTriple{NodeId("MS_A"), NodeId("MS_B"), "RPC"}, 3}, {CallTriple{NodeId("MS_B"), NodeId("MS_C"), "DB"}, 1}};
  Counts<CallTriple> q{{CallTriple{NodeId("MS_A"), NodeId("MS_B"), "RPC"}, 1}, {CallTriple{NodeId("MS_B"), NodeId("MS_C"), "DB"}, 1}};
  double kl = kl_divergence(popular_call_distribution(p, 100), q);
  double kl_err = std::abs(kl - kl_direct({0.75, 0.25}, {0.5, 0.5}));

  Rng rng(7);
  double worst = 0;
  for (int trial = 0; trial < 1000; ++trial) {
    auto draw = [&] {
      std::vector<double> v(static_cast<std::size_t>(rng.uniform_int(1, 8)));
      for (auto& x : v) x = rng.bernoulli(0.3) ? double(rng.uniform_int(0, 4)) : rng.uniform01() * 200 - 100;
      return v;
    };
    auto a = draw(), b = draw();
    worst = std::max(worst, std::abs(emd_normalized(a, b) - emd_transport_oracle(a, b)));
  }
  return {std::abs(kl_self) <= 1e-9 && emd_self <= 1e-9 && kl_err <= 1e-9 && worst <= 1e-9,
          "KL(X,X) " + fmt("%.1e", std::abs(kl_self)) + ", EMD(S,S) " + fmt("%.1e", emd_self) + ", KL example " +
              fmt("%.6f", kl) + " (error " + fmt("%.1e", kl_err) + "), EMD fuzz worst error " + fmt("%.1e", worst) +
              " over 1000 cases"};
}

Outcome p_drop_statistics() {
  auto corpus = build_pretraining_corpus(first_n(10000), 0.9, 99);
  std::size_t depth = 0, edges = 0, latency = 0, service = 0;
  for (const auto& s : corpus) {
    PartialConditions h = parse_layer_sequence(s.text).front().header;
    depth += h.remaining_depth.has_value();
    edges += h.num_edges.has_value();
    latency += h.latency_ms.has_value();
    service += h.service_id.has_value();
  }
  const double n = double(corpus.size());
  auto in_band = [&](std::size_t k) { return k / n >= 0.08 && k / n <= 0.12; };
  return {corpus.size() == 10000 && in_band(depth) && in_band(edges) && in_band(latency) && service == corpus.size(),
          "keep rates depth " + fmt("%.4f", depth / n) + ", num_edges " + fmt("%.4f", edges / n) + ", latency " +
              fmt("%.4f", latency / n) + "; service id in " + std::to_string(service) + "/" +
              std::to_string(corpus.size())};
}

Outcome instruction_exclusivity() {
  InstructionOptions o;
  o.fraction = 1.0;
  o.seed = 5;
  auto corpus = build_instruction_corpus(fixture_graphs(), fixture_stats(), o);
  std::size_t both = 0, tagged = 0, compliant = 0, high = 0, uncommon = 0;
  std::map<std::size_t, int> per_graph;
  for (const auto& s : corpus) {
    bool h = s.has_tag(InstructionTag::kHighLatency), u = s.has_tag(InstructionTag::kUncommonComm);
    both += h && u;
    high += h;
    uncommon += u;
    if (s.special.empty()) continue;
    ++tagged;
    per_graph[s.graph_index] += static_cast<int>(s.special.size());
    bool ok = true;
    for (const auto& ins : s.special) ok = ok && check_instruction_compliance(fixture_graphs()[s.graph_index], ins, fixture_stats());
    compliant += ok;
  }
  std::size_t doubled = 0;
  for (const auto& [_, n] : per_graph) doubled += n > 1;
  return {both == 0 && doubled == 0 && compliant == tagged && high > 0 && uncommon > 0,
          std::to_string(corpus.size()) + " samples, " + std::to_string(tagged) + " tagged (" + std::to_string(high) +
              " high latency, " + std::to_string(uncommon) + " uncommon call), " + std::to_string(both) +
              " with both, " + std::to_string(doubled) + " graphs tagged twice, " + std::to_string(compliant) + "/" +
              std::to_string(tagged) + " compliant"};
}

Outcome memorization() {
  auto t0 = Clock::now();
  auto train = first_n(1000);
  auto hashes = training_hashes(train);
  double same = memorization_rate(train, hashes);
  std::vector<CallGraph> shifted(train.begin(), train.end());
  for (auto& g : shifted)
    for (auto& e : g.edges) {
      e.start_ms += 1;
      e.finish_ms += 1;
    }
  double moved = memorization_rate(shifted, hashes);
  double secs = seconds_since(t0);
  return {same == 1.0 && moved == 0.0 && secs < 5,
          "copy " + fmt("%.3f", same) + ", every edge moved by +1 ms " + fmt("%.3f", moved) + ", " + fmt("%.3f s", secs)};
}

std::string slurp_or_empty(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  std::ostringstream os;
  os << in.rdbuf();
  return os.str();
}

Outcome cli_determinism() {
  TempDir dir;
  write_graphs_jsonl(dir.file("graphs.jsonl"), first_n(1000));
  auto tg = [](std::vector<std::string> args) {
    args.insert(args.begin(), {"tracegen", "--quiet", "-j", "2"});
    return cli::run(args);
  };
  if (tg({"stats", "--graphs", dir.file("graphs.jsonl"), "--out", dir.file("stats.json")}) != 0)
    return {false, "stats command failed"};

  std::vector<std::pair<std::string, std::vector<std::string>>> runs = {
      {"pretrain", {"corpus", "pretrain", "--graphs", dir.file("graphs.jsonl"), "--out", dir.file("pretrain.jsonl"), "--seed", "3"}},
      {"instruction",
       {"corpus", "instruction", "--graphs", dir.file("graphs.jsonl"), "--out", dir.file("instruction.jsonl"), "--seed", "3"}},
      {"tabular", {"corpus", "tabular", "--graphs", dir.file("graphs.jsonl"), "--out", dir.file("tabular.jsonl"), "--seed", "3"}},
      {"generate",
       {"generate", "--backend", "statistical", "--stats", dir.file("stats.json"), "--prompts-from", dir.file("graphs.jsonl"),
        "--out", dir.file("generated.jsonl"), "--seed", "3"}},
  };
  std::size_t identical = 0, files = 0;
  for (const auto& [name, args] : runs) {
    const std::string out = dir.file(name == "generate" ? "generated.jsonl" : name + ".jsonl");
    std::vector<std::string> paths{out, out + ".manifest.json"};
    if (name == "generate") paths.push_back(out + ".sessions.jsonl");
    if (tg(args) != 0) return {false, name + " run failed"};
    std::vector<std::string> first;
    for (const auto& p : paths) first.push_back(slurp_or_empty(p));
    if (tg(args) != 0) return {false, name + " rerun failed"};
    for (std::size_t i = 0; i < paths.size(); ++i) {
      ++files;
      if (!first[i].empty() && first[i] == slurp_or_empty(paths[i])) ++identical;
    }
  }
  return {identical == files, std::to_string(identical) + "/" + std::to_string(files) +
                                  " output files byte-identical across repeated corpus and generate runs"};
}

}  // namespace

int main() {
  const std::vector<std::pair<std::string, std::function<Outcome()>>> criteria = {
      {"validator soundness", validator_soundness},
      {"validator completeness", validator_completeness},
      {"codec round trip", codec_round_trip},
      {"replay factorization", replay_factorization},
      {"statistical generation grid", statistical_grid},
      {"probabilistic baseline", probabilistic_baseline},
      {"metric oracles", metric_oracles},
      {"p_drop statistics", p_drop_statistics},
      {"instruction exclusivity", instruction_exclusivity},
      {"memorization", memorization},
      {"cli determinism", cli_determinism},
  };
  std::cerr << "fixture: " << fixture_graphs().size() << " graphs\n";
  int failed = 0;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    Outcome o;
    try {
      o = criteria[i].second();
    } catch (const std::exception& e) {
      o = {false, std::string("threw: ") + e.what()};
    }
    failed += !o.pass;
    std::cout << (o.pass ? "PASS" : "FAIL") << " [" << (i + 1) << "] " << criteria[i].first << ": " << o.detail
              << std::endl;
  }
  return failed == 0 ? 0 : 1;
}
