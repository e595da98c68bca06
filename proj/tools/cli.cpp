// Copyright 2026 The tracegen Authors
// SPDX-License-Identifier: Apache-2.0

#include "cli.hpp"

#include <CLI11.hpp>

#include <algorithm>
#include <fstream>
#include <iostream>
#include <map>
#include <memory>
#include <mutex>
#include <sstream>

#include "tracegen/accuracy_grid.hpp"
#include "tracegen/assemble.hpp"
#include "tracegen/corpus.hpp"
#include "tracegen/driver.hpp"
#include "tracegen/graph.hpp"
#include "tracegen/graph_json.hpp"
#include "tracegen/hash.hpp"
#include "tracegen/http_backend.hpp"
#include "tracegen/layers.hpp"
#include "tracegen/metrics.hpp"
#include "tracegen/parallel.hpp"
#include "tracegen/probabilistic.hpp"
#include "tracegen/replay_backend.hpp"
#include "tracegen/statistical_backend.hpp"
#include "tracegen/trace_reader.hpp"
#include "tracegen/validator.hpp"

namespace tracegen::cli {
namespace {

constexpr const char* kVersion = "0.3.0";

const std::vector<std::string> kSubcommands = {"ingest",   "stats",    "corpus",   "generate",
                                               "baseline", "validate", "evaluate", "accuracy-grid"};

// Thrown for inputs that parse but make no sense together.
class UsageError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct Global {
  unsigned jobs = 1;
  bool quiet = false;
  std::string config;
};

struct Logger {
  bool quiet = false;
  template <typename... Args>
  void operator()(const Args&... args) const {
    if (quiet) return;
    std::ostringstream os;
    os << "tracegen: ";
    (os << ... << args);
    os << '\n';
    std::cerr << os.str();
  }
};

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open '" + path + "'");
  std::ostringstream os;
  os << in.rdbuf();
  return os.str();
}

void write_text(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw std::runtime_error("cannot write '" + path + "'");
  out << text;
}

// ---- config merging -------------------------------------------------------

std::vector<std::string> config_flags(const Json& values, const CLI::App* scope) {
  std::vector<std::string> out;
  for (const auto& [key, value] : values.items()) {
    if (value.is_object()) continue;
    const CLI::Option* opt = scope->get_option_no_throw("--" + key);
    if (!opt) continue;
    std::string flag = "--" + key;
    if (value.is_boolean()) {
      if (value.get<bool>()) out.push_back(flag);
      continue;
    }
    auto scalar = [](const Json& v) { return v.is_string() ? v.get<std::string>() : v.dump(); };
    if (value.is_array()) {
      for (const auto& v : value) {
        out.push_back(flag);
        out.push_back(scalar(v));
      }
    } else if (!value.is_null()) {
      out.push_back(flag);
      out.push_back(scalar(value));
    }
  }
  return out;
}

std::string find_config_path(const std::vector<std::string>& args) {
  for (std::size_t i = 1; i < args.size(); ++i) {
    if (args[i] == "--config" && i + 1 < args.size()) return args[i + 1];
    if (args[i].rfind("--config=", 0) == 0) return args[i].substr(9);
  }
  return {};
}

// Inserts flags from the config file ahead of the user's own so that, with
// the take-last policy, flags given on the command line win. Top-level keys
// apply to the program and the chosen subcommand; an object keyed by the
// subcommand name applies to that subcommand only.
std::vector<std::string> merge_config(const std::vector<std::string>& args, CLI::App& app) {
  std::string path = find_config_path(args);
  if (path.empty()) return args;
  Json cfg = read_json_file(path);
  if (!cfg.is_object()) throw UsageError("config file must hold a JSON object");

  auto sub_pos = std::find_if(args.begin() + 1, args.end(), [](const std::string& a) {
    return std::find(kSubcommands.begin(), kSubcommands.end(), a) != kSubcommands.end();
  });
  std::vector<std::string> out{args.front()};
  auto global = config_flags(cfg, &app);
  out.insert(out.end(), global.begin(), global.end());
  if (sub_pos == args.end()) {
    out.insert(out.end(), args.begin() + 1, args.end());
    return out;
  }
  out.insert(out.end(), args.begin() + 1, sub_pos + 1);
  const CLI::App* sub = app.get_subcommand(*sub_pos);
  auto local = config_flags(cfg, sub);
  if (cfg.contains(*sub_pos) && cfg[*sub_pos].is_object()) {
    auto scoped = config_flags(cfg[*sub_pos], sub);
    local.insert(local.end(), scoped.begin(), scoped.end());
  }
  // Global flags that also exist on the subcommand were already consumed.
  out.insert(out.end(), local.begin(), local.end());
  out.insert(out.end(), sub_pos + 1, args.end());
  return out;
}

// ---- manifests ------------------------------------------------------------

Json option_values(CLI::App* scope) {
  Json out = Json::object();
  for (CLI::Option* opt : scope->get_options()) {
    std::string name = opt->get_single_name();
    if (name == "help" || name == "h" || name == "config") continue;
    if (opt->get_type_size() == 0) {
      out[name] = opt->count() > 0;
      continue;
    }
    if (opt->count() == 0) {
      if (opt->get_default_str().empty()) continue;
      out[name] = opt->get_default_str();
      continue;
    }
    const auto& r = opt->results();
    if (opt->get_expected_max() <= 1)
      out[name] = r.back();
    else
      out[name] = r;
  }
  return out;
}

void write_manifest(const std::string& out_path, CLI::App& app, CLI::App* sub, const std::vector<std::string>& inputs,
                    const std::vector<std::string>& outputs) {
  Json in = Json::array();
  for (const auto& path : inputs) in.push_back(Json{{"path", path}, {"sha256", sha256(read_file(path)).hex()}});
  Json config = option_values(&app);
  config[sub->get_name()] = option_values(sub);
  Json manifest{{"tool", "tracegen"},
                {"version", kVersion},
                {"format_version", std::string(kFormatVersion)},
                {"command", sub->get_name()},
                {"config", std::move(config)},
                {"inputs", std::move(in)},
                {"outputs", outputs}};
  write_json_file(out_path + ".manifest.json", manifest);
}

// ---- shared option groups -------------------------------------------------

struct SamplingFlags {
  double temperature = 0.8;
  int top_k = 50;
  int max_tokens = 2048;
  std::uint64_t seed = 0;
  int max_retries = 4;
  std::size_t max_layers = 256;
  bool depth_first = false;

  void add(CLI::App* sub, int default_retries) {
    max_retries = default_retries;
    sub->add_option("--temperature", temperature, "Sampling temperature; 0 is greedy")
        ->check(CLI::NonNegativeNumber)
        ->capture_default_str();
    sub->add_option("--top-k", top_k, "Top-k cutoff; 0 disables it")->check(CLI::NonNegativeNumber)->capture_default_str();
    sub->add_option("--max-tokens", max_tokens, "Completion length cap")->check(CLI::PositiveNumber)->capture_default_str();
    sub->add_option("--seed", seed, "Base seed")->capture_default_str();
    sub->add_option("--max-retries", max_retries, "Re-samples per rejected layer")
        ->check(CLI::NonNegativeNumber)
        ->capture_default_str();
    sub->add_option("--max-layers", max_layers, "Backend calls per session, retries excluded")
        ->check(CLI::PositiveNumber)
        ->capture_default_str();
    sub->add_flag("--depth-first", depth_first, "Expand pending layers depth-first instead of FIFO");
  }

  CompletionParams params() const {
    CompletionParams p;
    p.temperature = temperature;
    p.top_k = top_k > 0 ? std::optional<int>(top_k) : std::nullopt;
    p.max_tokens = max_tokens;
    p.seed = seed;
    return p;
  }

  GenerationLimits limits() const {
    GenerationLimits l;
    l.max_layers = max_layers;
    l.max_retries = max_retries;
    l.depth_first = depth_first;
    return l;
  }
};

struct BackendFlags {
  std::string kind = "statistical";
  std::string stats;
  std::string replay_graphs;
  std::string url;
  int timeout_ms = 30000;
  int http_retries = 3;
  unsigned max_in_flight = 4;
  std::vector<std::string> stop;

  void add(CLI::App* sub) {
    sub->add_option("--backend", kind, "Completion backend")
        ->check(CLI::IsMember({"replay", "statistical", "http"}))
        ->capture_default_str();
    sub->add_option("--stats", stats, "Corpus statistics for the statistical backend")->check(CLI::ExistingFile);
    sub->add_option("--replay-graphs", replay_graphs, "Graphs whose layers the replay backend answers with")
        ->check(CLI::ExistingFile);
    sub->add_option("--url", url, "HTTP endpoint (default: $TRACEGEN_BACKEND_URL)");
    sub->add_option("--timeout-ms", timeout_ms, "HTTP timeout per try")->check(CLI::PositiveNumber)->capture_default_str();
    sub->add_option("--http-retries", http_retries, "HTTP retries per call")->check(CLI::NonNegativeNumber)->capture_default_str();
    sub->add_option("--max-in-flight", max_in_flight, "Concurrent HTTP requests")->check(CLI::PositiveNumber)->capture_default_str();
    sub->add_option("--stop", stop, "Stop sequences sent to the HTTP backend (repeatable)");
  }

  std::shared_ptr<Backend> http() const {
    HttpBackendOptions o = HttpBackendOptions::from_env();
    if (!url.empty()) o.url = url;
    if (o.url.empty()) throw UsageError("http backend needs --url or TRACEGEN_BACKEND_URL");
    o.timeout = std::chrono::milliseconds(timeout_ms);
    o.max_retries = http_retries;
    o.max_in_flight = max_in_flight;
    if (!stop.empty()) o.stop = stop;
    return std::make_shared<HttpBackend>(o);
  }

  std::shared_ptr<Backend> statistical() const {
    if (stats.empty()) throw UsageError("statistical backend needs --stats");
    return std::make_shared<StatisticalBackend>(fit_probabilistic(stats_from_json(read_json_file(stats))));
  }
};

std::vector<LayerConditions> read_prompts(const std::string& path) {
  std::vector<LayerConditions> out;
  for (const auto& j : read_jsonl(path)) out.push_back(conditions_from_json(j));
  return out;
}

Json session_json(std::size_t index, const GenerationResult& r, const std::string& error) {
  const GenerationSession& s = r.session;
  Json j{{"index", index},
         {"status", error.empty() ? std::string(to_string(s.status)) : std::string("FAILED")},
         {"layers", s.produced.size()},
         {"retries", s.retries_used}};
  if (!error.empty()) {
    j["failure"] = error;
  } else if (s.failure) {
    j["failure"] = std::string(to_string(*s.failure));
    j["detail"] = s.failure_detail;
    j["violations"] = to_json(s.violations);
  }
  if (r.graph) j["hash"] = canonical_hash(*r.graph).hex();
  return j;
}

// ---- subcommands ----------------------------------------------------------

struct IngestCmd {
  std::vector<std::string> inputs;
  std::string out;
  std::string rejects;
  std::string schema;
  bool no_dedup = false;

  void add(CLI::App* sub) {
    sub->add_option("--in", inputs, "Trace tables (CSV/TSV, optionally gzip)")->required()->check(CLI::ExistingFile);
    sub->add_option("--out", out, "Accepted graphs, JSON lines")->required();
    sub->add_option("--rejects", rejects, "Reject summary (default: <out>.rejects.json)");
    sub->add_option("--schema", schema, "JSON column mapping overriding the Alibaba defaults")->check(CLI::ExistingFile);
    sub->add_flag("--no-dedup", no_dedup, "Keep graphs with identical structure");
  }

  int run(CLI::App& app, CLI::App* sub, const Global&, const Logger& log) {
    TraceSchema ts;
    if (!schema.empty()) {
      Json j = read_json_file(schema);
      auto str = [&](const char* key, std::string& field) {
        if (j.contains(key)) field = j[key].get<std::string>();
      };
      str("trace_id", ts.trace_id);
      str("rpc_id", ts.rpc_id);
      str("upstream", ts.upstream);
      str("downstream", ts.downstream);
      str("rpc_type", ts.rpc_type);
      str("response_time", ts.response_time);
      str("timestamp", ts.timestamp);
      str("service", ts.service);
      if (j.contains("delimiter")) {
        std::string d = j["delimiter"].get<std::string>();
        ts.delimiter = d == "\\t" ? '\t' : d.empty() ? '\0' : d[0];
      }
    }
    std::vector<RawEdgeRecord> records;
    std::size_t malformed = 0;
    for (const auto& path : inputs) {
      auto reader = TraceReader::open(path, ts);
      auto part = reader.read_all();
      records.insert(records.end(), std::make_move_iterator(part.begin()), std::make_move_iterator(part.end()));
      malformed += reader.malformed_rows();
    }
    AssembleResult res = assemble_graphs(records);
    res.rejects.malformed_rows += malformed;
    std::size_t assembled = res.graphs.size();
    std::vector<CallGraph> graphs = no_dedup ? std::move(res.graphs) : deduplicate(res.graphs);
    write_graphs_jsonl(out, graphs);
    std::string rejects_path = rejects.empty() ? out + ".rejects.json" : rejects;
    Json summary = to_json(res.rejects);
    summary["records"] = records.size();
    summary["assembled_graphs"] = assembled;
    summary["duplicates_removed"] = assembled - graphs.size();
    summary["accepted_graphs"] = graphs.size();
    write_json_file(rejects_path, summary);
    write_manifest(out, app, sub, inputs, {out, rejects_path});
    log("ingest: ", records.size(), " records, ", graphs.size(), " graphs kept, ", res.rejects.rejected_graphs(),
        " rejected, ", malformed, " malformed rows");
    return kExitOk;
  }
};

struct StatsCmd {
  std::string graphs;
  std::string out;

  void add(CLI::App* sub) {
    sub->add_option("--graphs", graphs, "Graphs, JSON lines")->required()->check(CLI::ExistingFile);
    sub->add_option("--out", out, "Statistics JSON")->required();
  }

  int run(CLI::App& app, CLI::App* sub, const Global& g, const Logger& log) {
    auto gs = read_graphs_jsonl(graphs);
    const std::size_t shards = std::max<std::size_t>(1, std::min<std::size_t>(g.jobs, gs.size()));
    std::vector<StatsAccumulator> parts(shards);
    parallel_for(shards, g.jobs, [&](std::size_t s) {
      for (std::size_t i = s; i < gs.size(); i += shards) parts[s].add(gs[i]);
    });
    for (std::size_t s = 1; s < shards; ++s) parts[0].merge(parts[s]);
    write_json_file(out, to_json(parts[0].finalize()));
    write_manifest(out, app, sub, {graphs}, {out});
    log("stats: ", gs.size(), " graphs");
    return kExitOk;
  }
};

struct CorpusCmd {
  std::string kind;
  std::string graphs;
  std::string out;
  std::string stats;
  double p_drop = 0.9;
  double fraction = 0.05;
  std::uint64_t seed = 0;
  std::string system_prompt = std::string(kDefaultSystemPrompt);

  void add(CLI::App* sub) {
    sub->add_option("kind,--kind", kind, "pretrain, instruction or tabular")
        ->required()
        ->check(CLI::IsMember({"pretrain", "instruction", "tabular"}));
    sub->add_option("--graphs", graphs, "Graphs, JSON lines")->required()->check(CLI::ExistingFile);
    sub->add_option("--out", out, "Corpus, JSON lines")->required();
    sub->add_option("--stats", stats, "Statistics for instruction tagging (default: computed from --graphs)")
        ->check(CLI::ExistingFile);
    sub->add_option("--p-drop", p_drop, "Attribute drop probability")->check(CLI::Range(0.0, 1.0))->capture_default_str();
    sub->add_option("--fraction", fraction, "Share of graphs turned into instruction samples")
        ->check(CLI::Range(0.0, 1.0))
        ->capture_default_str();
    sub->add_option("--seed", seed, "Seed")->capture_default_str();
    sub->add_option("--system-prompt", system_prompt, "System prompt of instruction samples")->capture_default_str();
  }

  int run(CLI::App& app, CLI::App* sub, const Global& g, const Logger& log) {
    auto gs = read_graphs_jsonl(graphs);
    std::vector<std::string> inputs{graphs};
    CorpusHeader header;
    header.kind = kind;
    header.seed = seed;
    std::size_t count = 0;
    if (kind == "instruction") {
      if (!(fraction > 0)) throw UsageError("--fraction must be positive");
      CorpusStats st;
      if (!stats.empty()) {
        st = stats_from_json(read_json_file(stats));
        inputs.push_back(stats);
      } else {
        st = compute_stats(gs);
      }
      InstructionOptions o;
      o.fraction = fraction;
      o.seed = seed;
      o.system_prompt = system_prompt;
      o.jobs = g.jobs;
      header.fraction = fraction;
      header.source_stats_digest = stats_digest(st);
      auto samples = build_instruction_corpus(gs, st, o);
      write_corpus(out, header, samples);
      count = samples.size();
    } else {
      header.p_drop = p_drop;
      auto samples = kind == "pretrain" ? build_pretraining_corpus(gs, p_drop, seed, g.jobs)
                                        : build_tabular_corpus(gs, p_drop, seed, g.jobs);
      write_corpus(out, header, samples);
      count = samples.size();
    }
    write_manifest(out, app, sub, inputs, {out});
    log("corpus ", kind, ": ", count, " samples from ", gs.size(), " graphs");
    return kExitOk;
  }
};

struct GenerateCmd {
  BackendFlags backend;
  SamplingFlags sampling;
  std::string prompts;
  std::string prompts_from;
  std::string out;
  std::string sessions;

  void add(CLI::App* sub) {
    backend.add(sub);
    sampling.add(sub, 4);
    auto* p = sub->add_option("--prompts", prompts, "Graph-level conditions, JSON lines")->check(CLI::ExistingFile);
    auto* f = sub->add_option("--prompts-from", prompts_from, "Use the graph-level conditions of these graphs")
                  ->check(CLI::ExistingFile);
    p->excludes(f);
    sub->add_option("--out", out, "Generated graphs, JSON lines")->required();
    sub->add_option("--sessions", sessions, "Per-prompt session log (default: <out>.sessions.jsonl)");
  }

  int run(CLI::App& app, CLI::App* sub, const Global& g, const Logger& log) {
    if (prompts.empty() && prompts_from.empty()) throw UsageError("generate needs --prompts or --prompts-from");
    std::vector<std::string> inputs;
    std::vector<LayerConditions> conds;
    std::vector<CallGraph> sources;
    if (!prompts.empty()) {
      conds = read_prompts(prompts);
      inputs.push_back(prompts);
    } else {
      sources = read_graphs_jsonl(prompts_from);
      for (const auto& s : sources) conds.push_back(graph_prompt(s));
      inputs.push_back(prompts_from);
    }

    // Replay answers per session from the prompt's own graph when prompts come
    // from graphs; otherwise from one table built over --replay-graphs.
    std::shared_ptr<Backend> shared;
    bool per_session_replay = false;
    if (backend.kind == "replay") {
      if (!backend.replay_graphs.empty()) {
        auto table = std::make_shared<ReplayBackend>();
        for (const auto& rg : read_graphs_jsonl(backend.replay_graphs)) table->add_graph(rg);
        shared = table;
        inputs.push_back(backend.replay_graphs);
      } else if (!sources.empty()) {
        per_session_replay = true;
      } else {
        throw UsageError("replay backend needs --replay-graphs or --prompts-from");
      }
    } else if (backend.kind == "statistical") {
      shared = backend.statistical();
      inputs.push_back(backend.stats);
    } else {
      shared = backend.http();
    }

    const CompletionParams base = sampling.params();
    const GenerationLimits limits = sampling.limits();
    std::vector<GenerationResult> results(conds.size());
    std::vector<std::string> errors(conds.size());
    std::mutex fatal_mu;
    std::string fatal;
    unsigned jobs = (shared && !shared->concurrent()) ? 1 : g.jobs;
    parallel_for(conds.size(), jobs, [&](std::size_t i) {
      CompletionParams p = base;
      p.seed = derive_seed(base.seed, i);
      std::shared_ptr<Backend> b = per_session_replay ? std::make_shared<ReplayBackend>(sources[i]) : shared;
      try {
        results[i] = recursive_generate(*b, conds[i], p, limits, "gen-" + std::to_string(i));
      } catch (const UnparsablePrompt& e) {
        errors[i] = std::string("UnparsablePrompt: ") + e.what();
      } catch (const BackendError& e) {
        std::lock_guard lock(fatal_mu);
        if (fatal.empty()) fatal = e.what();
        errors[i] = std::string("BackendError: ") + e.what();
      }
    });

    std::vector<CallGraph> graphs;
    std::string session_text;
    for (std::size_t i = 0; i < results.size(); ++i) {
      if (results[i].graph) graphs.push_back(*results[i].graph);
      session_text += session_json(i, results[i], errors[i]).dump() + '\n';
    }
    std::string sessions_path = sessions.empty() ? out + ".sessions.jsonl" : sessions;
    write_graphs_jsonl(out, graphs);
    write_text(sessions_path, session_text);
    write_manifest(out, app, sub, inputs, {out, sessions_path});
    log("generate: ", graphs.size(), " of ", conds.size(), " sessions done");
    if (!fatal.empty()) {
      std::cerr << "tracegen: backend failure: " << fatal << '\n';
      return kExitBackend;
    }
    return kExitOk;
  }
};

struct BaselineCmd {
  std::string stats;
  std::string out;
  std::size_t count = 1000;
  std::uint64_t seed = 0;
  std::int64_t max_depth = 64;

  void add(CLI::App* sub) {
    sub->add_option("--stats", stats, "Corpus statistics")->required()->check(CLI::ExistingFile);
    sub->add_option("--out", out, "Sampled graphs, JSON lines")->required();
    sub->add_option("--count", count, "Number of graphs")->capture_default_str();
    sub->add_option("--seed", seed, "Seed")->capture_default_str();
    sub->add_option("--max-depth", max_depth, "Depth cap")->check(CLI::PositiveNumber)->capture_default_str();
  }

  int run(CLI::App& app, CLI::App* sub, const Global& g, const Logger& log) {
    ProbModel model = fit_probabilistic(stats_from_json(read_json_file(stats)));
    SampleLimits limits;
    limits.max_depth = max_depth;
    auto graphs = parallel_map<CallGraph>(count, g.jobs, [&](std::size_t i) {
      return sample_probabilistic(model, NodeId::client(), derive_seed(seed, i), limits);
    });
    write_graphs_jsonl(out, graphs);
    write_manifest(out, app, sub, {stats}, {out});
    log("baseline: ", graphs.size(), " graphs");
    return kExitOk;
  }
};

struct ValidateCmd {
  std::string graphs;
  std::string prompts;
  std::string layers;
  std::string out;

  void add(CLI::App* sub) {
    sub->add_option("--graphs", graphs, "Graphs to judge, JSON lines")->check(CLI::ExistingFile);
    sub->add_option("--prompts", prompts, "Prompt per graph (same line order), JSON lines")->check(CLI::ExistingFile);
    sub->add_option("--layers", layers, "Layer outputs {conditions, text}, JSON lines")->check(CLI::ExistingFile);
    sub->add_option("--out", out, "Verdicts, JSON lines")->required();
  }

  int run(CLI::App& app, CLI::App* sub, const Global&, const Logger& log) {
    if (graphs.empty() == layers.empty()) throw UsageError("validate needs exactly one of --graphs and --layers");
    std::string text;
    std::vector<std::string> inputs;
    std::size_t total = 0;
    std::size_t passed = 0;
    if (!graphs.empty()) {
      inputs.push_back(graphs);
      auto gs = read_graphs_jsonl(graphs);
      std::vector<Json> ps;
      if (!prompts.empty()) {
        ps = read_jsonl(prompts);
        inputs.push_back(prompts);
        if (ps.size() != gs.size())
          throw std::runtime_error("--prompts has " + std::to_string(ps.size()) + " lines for " +
                                   std::to_string(gs.size()) + " graphs");
      }
      for (std::size_t i = 0; i < gs.size(); ++i) {
        GenerationTarget t;
        if (!ps.empty()) {
          const Json& p = ps[i];
          if (p.contains("num_edges")) t.num_edges = p["num_edges"].get<std::int64_t>();
          if (p.contains("remaining_depth")) t.depth = p["remaining_depth"].get<std::int64_t>();
          if (p.contains("depth")) t.depth = p["depth"].get<std::int64_t>();
          if (p.contains("latency")) t.latency_ms = p["latency"].get<std::int64_t>();
        }
        AccuracyVerdict v = validate_generation(gs[i], t);
        passed += v.valid;
        ++total;
        text += Json{{"index", i},
                     {"trace_id", gs[i].trace_id},
                     {"valid", v.valid},
                     {"matched_num_edges", v.matched_num_edges},
                     {"matched_depth", v.matched_depth},
                     {"matched_latency", v.matched_latency},
                     {"violations", to_json(v.violations)}}
                    .dump() +
                '\n';
      }
    } else {
      inputs.push_back(layers);
      std::size_t i = 0;
      for (const auto& j : read_jsonl(layers)) {
        LayerConditions c = conditions_from_json(j.at("conditions"));
        ValidationReport r = validate_layer_text(j.at("text").get<std::string>(), c);
        passed += r.empty();
        ++total;
        text += Json{{"index", i++}, {"valid", r.empty()}, {"violations", to_json(r)}}.dump() + '\n';
      }
    }
    write_text(out, text);
    write_manifest(out, app, sub, inputs, {out});
    log("validate: ", passed, " of ", total, " valid");
    return kExitOk;
  }
};

struct EvaluateCmd {
  std::string real;
  std::string syn;
  std::string out;
  std::size_t top_n = 100;
  double eps = 1e-6;
  bool log2 = false;
  std::vector<std::size_t> ks = {5, 10, 20, 50};

  void add(CLI::App* sub) {
    sub->add_option("--real", real, "Reference graphs, JSON lines")->required()->check(CLI::ExistingFile);
    sub->add_option("--syn", syn, "Synthetic graphs, JSON lines")->required()->check(CLI::ExistingFile);
    sub->add_option("--out", out, "Report JSON")->required();
    sub->add_option("--top-n", top_n, "Popular calls kept for KL")->check(CLI::PositiveNumber)->capture_default_str();
    sub->add_option("--eps", eps, "Probability floor for KL")->check(CLI::PositiveNumber)->capture_default_str();
    sub->add_flag("--log2", log2, "KL in bits instead of nats");
    sub->add_option("--k", ks, "Heavy-hitter K values")->delimiter(',')->capture_default_str();
  }

  int run(CLI::App& app, CLI::App* sub, const Global&, const Logger& log) {
    auto r = read_graphs_jsonl(real);
    auto s = read_graphs_jsonl(syn);
    EvaluationOptions o;
    o.kl.top_n = top_n;
    o.kl.eps = eps;
    o.kl.log2 = log2;
    o.heavy_hitter_k = ks;
    Evaluation ev = evaluate(r, s, o);
    Json hh = Json::object();
    for (const auto& [k, v] : ev.heavy_hitter) hh[std::to_string(k)] = v;
    Json report{{"real_graphs", r.size()},
                {"synthetic_graphs", s.size()},
                {"kl_popular_calls", ev.kl_popular_calls},
                {"heavy_hitter", std::move(hh)},
                {"emd_response_time", ev.emd_response_time},
                {"emd_in_degree", ev.emd_in_degree},
                {"emd_out_degree", ev.emd_out_degree},
                {"memorization_rate", ev.memorization_rate}};
    write_json_file(out, report);
    write_manifest(out, app, sub, {real, syn}, {out});
    if (!log.quiet) {
      std::ostringstream os;
      os << "metric                 value\n";
      auto row = [&](const std::string& name, double v) {
        os << name << std::string(name.size() < 23 ? 23 - name.size() : 1, ' ') << v << '\n';
      };
      row("kl_popular_calls", ev.kl_popular_calls);
      for (const auto& [k, v] : ev.heavy_hitter) row("heavy_hitter@" + std::to_string(k), v);
      row("emd_response_time", ev.emd_response_time);
      row("emd_in_degree", ev.emd_in_degree);
      row("emd_out_degree", ev.emd_out_degree);
      row("memorization_rate", ev.memorization_rate);
      std::cerr << os.str();
    }
    return kExitOk;
  }
};

struct GridCmd {
  BackendFlags backend;
  SamplingFlags sampling;
  std::string graphs;
  std::string out;
  std::int64_t min_edges = 1, max_edges = 30, min_depth = 1, max_depth = 6;
  std::size_t samples = 50;
  std::string service;
  std::int64_t latency = -1;

  void add(CLI::App* sub) {
    backend.add(sub);
    sampling.add(sub, 0);
    sub->add_option("--graphs", graphs, "Real graphs supplying replay prompts per cell")->check(CLI::ExistingFile);
    sub->add_option("--out", out, "Grid JSON; a CSV matrix goes to <out>.csv")->required();
    sub->add_option("--min-edges", min_edges)->check(CLI::PositiveNumber)->capture_default_str();
    sub->add_option("--max-edges", max_edges)->check(CLI::PositiveNumber)->capture_default_str();
    sub->add_option("--min-depth", min_depth)->check(CLI::PositiveNumber)->capture_default_str();
    sub->add_option("--max-depth", max_depth)->check(CLI::PositiveNumber)->capture_default_str();
    sub->add_option("--samples", samples, "Sessions per cell")->check(CLI::PositiveNumber)->capture_default_str();
    sub->add_option("--service", service, "Service id in prompts (default: most frequent in --stats)");
    sub->add_option("--latency", latency, "Latency in prompts (default: that service's p90)");
  }

  int run(CLI::App& app, CLI::App* sub, const Global& g, const Logger& log) {
    if (min_edges > max_edges || min_depth > max_depth) throw UsageError("empty grid range");
    GridOptions o;
    o.min_edges = min_edges;
    o.max_edges = max_edges;
    o.min_depth = min_depth;
    o.max_depth = max_depth;
    o.samples_per_cell = samples;
    o.params = sampling.params();
    o.limits = sampling.limits();
    o.seed = sampling.seed;
    o.jobs = g.jobs;
    std::vector<std::string> inputs;

    PromptFactory prompts;
    BackendFactory backends;
    if (backend.kind == "replay") {
      if (graphs.empty()) throw UsageError("replay grid needs --graphs");
      inputs.push_back(graphs);
      auto gs = std::make_shared<std::vector<CallGraph>>(read_graphs_jsonl(graphs));
      auto by_shape = std::make_shared<std::map<std::pair<std::int64_t, std::int64_t>, std::vector<std::size_t>>>();
      for (std::size_t i = 0; i < gs->size(); ++i) {
        GraphAttributes a = attributes((*gs)[i]);
        (*by_shape)[{a.num_edges, a.depth}].push_back(i);
      }
      auto pick = [gs, by_shape](std::int64_t n, std::int64_t d, std::size_t sample) -> const CallGraph* {
        auto it = by_shape->find({n, d});
        if (it == by_shape->end()) return nullptr;
        return &(*gs)[it->second[sample % it->second.size()]];
      };
      prompts = [pick](std::int64_t n, std::int64_t d, std::size_t sample) -> std::optional<LayerConditions> {
        const CallGraph* src = pick(n, d, sample);
        if (!src) return std::nullopt;
        return graph_prompt(*src);
      };
      backends = [pick](const LayerConditions&, std::int64_t n, std::int64_t d, std::size_t sample) {
        return std::shared_ptr<Backend>(std::make_shared<ReplayBackend>(*pick(n, d, sample)));
      };
    } else {
      std::shared_ptr<Backend> shared;
      NodeId svc(service);
      std::int64_t lat = latency;
      if (backend.kind == "statistical") {
        shared = backend.statistical();
        inputs.push_back(backend.stats);
      } else {
        shared = backend.http();
      }
      if (!backend.stats.empty() && (service.empty() || latency < 0)) {
        CorpusStats st = stats_from_json(read_json_file(backend.stats));
        if (service.empty() && !st.graphs_per_service.empty()) {
          auto best = std::max_element(st.graphs_per_service.begin(), st.graphs_per_service.end(),
                                       [](const auto& a, const auto& b) { return a.second < b.second; });
          svc = best->first;
        }
        if (latency < 0 && st.per_service_p90_latency.count(svc)) lat = st.per_service_p90_latency.at(svc);
      }
      if (svc.empty()) throw UsageError("--service is required without --stats");
      if (lat < 0) lat = 100;
      if (!shared->concurrent()) o.jobs = 1;
      prompts = fixed_prompt_factory(svc, lat);
      backends = [shared](const LayerConditions&, std::int64_t, std::int64_t, std::size_t) { return shared; };
    }

    AccuracyGrid grid = accuracy_grid(backends, prompts, o);
    write_json_file(out, to_json(grid));
    write_text(out + ".csv", grid_csv(grid));
    write_manifest(out, app, sub, inputs, {out, out + ".csv"});
    std::size_t cells = 0;
    double sum = 0;
    for (const auto& c : grid.cells)
      if (c.satisfiable) {
        ++cells;
        sum += c.fraction;
      }
    log("accuracy-grid: ", grid.cells.size(), " cells, mean accuracy over ", cells,
        " satisfiable cells = ", cells ? sum / static_cast<double>(cells) : 0.0);
    return kExitOk;
  }
};

}  // namespace

int run(const std::vector<std::string>& raw_args) {
  CLI::App app{"Call-graph trace toolkit: ingest, encode, generate, validate, evaluate.", "tracegen"};
  app.option_defaults()->multi_option_policy(CLI::MultiOptionPolicy::TakeLast);
  app.require_subcommand(1);
  app.set_version_flag("--version", kVersion);

  Global global;
  app.add_option("--config", global.config, "JSON file of default flags; command-line flags win");
  app.add_option("--jobs,-j", global.jobs, "Worker threads")->check(CLI::PositiveNumber)->capture_default_str();
  app.add_flag("--quiet,-q", global.quiet, "No progress output on stderr");

  IngestCmd ingest;
  StatsCmd stats;
  CorpusCmd corpus;
  GenerateCmd generate;
  BaselineCmd baseline;
  ValidateCmd validate;
  EvaluateCmd evaluate_cmd;
  GridCmd grid;

  std::map<CLI::App*, std::function<int(CLI::App*)>> dispatch;
  Logger log;
  auto reg = [&](const std::string& name, const std::string& help, auto& cmd) {
    CLI::App* sub = app.add_subcommand(name, help);
    sub->fallthrough();
    cmd.add(sub);
    dispatch[sub] = [&app, &cmd, &global, &log](CLI::App* s) { return cmd.run(app, s, global, log); };
  };
  reg("ingest", "Parse trace tables into call graphs", ingest);
  reg("stats", "Fit corpus statistics", stats);
  reg("corpus", "Build a pre-training, instruction or tabular corpus", corpus);
  reg("generate", "Generate graphs layer by layer through a backend", generate);
  reg("baseline", "Sample graphs from the statistical baseline", baseline);
  reg("validate", "Judge generated graphs or layer outputs", validate);
  reg("evaluate", "Compare a synthetic corpus with a real one", evaluate_cmd);
  reg("accuracy-grid", "Generation accuracy over (num_edges, depth) cells", grid);

  try {
    std::vector<std::string> args = merge_config(raw_args, app);
    std::vector<const char*> argv;
    for (const auto& a : args) argv.push_back(a.c_str());
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e, std::cout, std::cerr);
    return code == 0 ? kExitOk : kExitUsage;
  } catch (const UsageError& e) {
    std::cerr << "tracegen: " << e.what() << '\n';
    return kExitUsage;
  } catch (const std::exception& e) {
    std::cerr << "tracegen: " << e.what() << '\n';
    return kExitInvalidInput;
  }
  log.quiet = global.quiet;

  CLI::App* sub = app.get_subcommands().front();
  try {
    return dispatch.at(sub)(sub);
  } catch (const UsageError& e) {
    std::cerr << "tracegen " << sub->get_name() << ": " << e.what() << '\n';
    return kExitUsage;
  } catch (const BackendError& e) {
    std::cerr << "tracegen " << sub->get_name() << ": backend failure: " << e.what() << '\n';
    return kExitBackend;
  } catch (const std::exception& e) {
    std::cerr << "tracegen " << sub->get_name() << ": " << e.what() << '\n';
    return kExitInvalidInput;
  }
}

int run(int argc, const char* const* argv) {
  std::vector<std::string> args(argv, argv + argc);
  if (args.empty()) args.emplace_back("tracegen");
  return run(args);
}

}  // namespace tracegen::cli
