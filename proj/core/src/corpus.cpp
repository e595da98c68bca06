// Copyright 2026 The tracegen Authors
// SPDX-License-Identifier: Apache-2.0

#include "tracegen/corpus.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <fstream>
#include <stdexcept>

#include "tracegen/graph.hpp"
#include "tracegen/layers.hpp"
#include "tracegen/parallel.hpp"
#include "tracegen/rng.hpp"

namespace tracegen {
namespace {

std::string fill(std::string_view tmpl, std::initializer_list<std::pair<std::string_view, std::string>> vars) {
  std::string out(tmpl);
  for (const auto& [name, value] : vars) {
    std::string key = "{" + std::string(name) + "}";
    for (std::size_t pos = out.find(key); pos != std::string::npos; pos = out.find(key, pos + value.size()))
      out.replace(pos, key.size(), value);
  }
  return out;
}

template <std::size_t N>
std::string_view pick(Rng& rng, const std::array<std::string_view, N>& options) {
  return options[static_cast<std::size_t>(rng.uniform_int(0, N - 1))];
}

constexpr std::array<std::string_view, 3> kServiceTemplates = {
    "This call graph belongs to service {S}.",
    "The request is handled by service {S}.",
    "All calls below serve a request to service {S}.",
};
constexpr std::array<std::string_view, 2> kRootTemplates = {
    "Start with the entry call made by {N}.",
    "The request enters the system from {N}.",
};
constexpr std::array<std::string_view, 3> kLayerTemplates = {
    "Generate the calls made by {N}, which was invoked by {C}.",
    "{C} called {N}; list the calls {N} makes next.",
    "Continue the graph below {N}, reached from {C}.",
};
constexpr std::array<std::string_view, 3> kBudgetTemplates = {
    "It should contain {E} edges and reach depth {D}.",
    "Use exactly {E} edges spread over {D} levels.",
    "The remaining subtree has {E} calls and is {D} levels deep.",
};
constexpr std::array<std::string_view, 2> kTimeTemplates = {
    "Calls start no earlier than {T} ms and finish by {L} ms.",
    "Every call must fit between {T} ms and {L} ms.",
};
constexpr std::array<std::string_view, 2> kIdTemplates = {
    "Number the edges from {I}.",
    "The first edge id is {I}.",
};

CallTriple first_uncommon(const CallGraph& g, const CorpusStats& stats, bool& found) {
  found = false;
  for (const Layer& layer : decompose_layers(g)) {
    for (const LayerEdge& e : layer.edges) {
      CallTriple t{layer.conditions.start_node, e.destination, e.comm_type};
      if (stats.is_uncommon(g.service_id, t)) {
        found = true;
        return t;
      }
    }
  }
  return {};
}

bool layer_has_call(const Layer& layer, const CallTriple& t) {
  if (layer.conditions.start_node != t.source) return false;
  return std::any_of(layer.edges.begin(), layer.edges.end(),
                     [&](const LayerEdge& e) { return e.destination == t.destination && e.comm_type == t.comm_type; });
}

std::ofstream open_out(const std::string& path) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw std::runtime_error("cannot write '" + path + "'");
  return out;
}

template <typename Sample>
void write_samples(const std::string& path, const CorpusHeader& header, std::span<const Sample> samples) {
  auto out = open_out(path);
  out << to_json(header).dump() << '\n';
  for (const auto& s : samples) out << to_json(s).dump() << '\n';
  if (!out) throw std::runtime_error("write to '" + path + "' failed");
}

}  // namespace

TextSample pretraining_sample(const CallGraph& g, double p_drop, std::uint64_t seed) {
  Rng rng(seed);
  HeaderOptions first;
  for (auto f : {ConditionField::kRemainingDepth, ConditionField::kNumEdges, ConditionField::kLatency})
    first.keep[static_cast<std::size_t>(f)] = !rng.bernoulli(p_drop);
  first.shuffle_seed = rng.next();

  TextSample s;
  s.format = SampleFormat::kRecursiveLayer;
  s.origin_hash = canonical_hash(g);
  auto layers = decompose_layers(g);
  for (std::size_t i = 0; i < layers.size(); ++i) {
    const Layer& l = layers[i];
    s.text += render_conditions(l.conditions, i == 0 ? first : HeaderOptions{});
    s.text += render_layer_completion(l.conditions, l.edges, l.children, false);
  }
  return s;
}

std::vector<TextSample> build_pretraining_corpus(std::span<const CallGraph> graphs, double p_drop, std::uint64_t seed,
                                                 unsigned jobs) {
  if (p_drop < 0 || p_drop > 1) throw std::invalid_argument("p_drop must lie in [0, 1]");
  return parallel_map<TextSample>(graphs.size(), jobs,
                                  [&](std::size_t i) { return pretraining_sample(graphs[i], p_drop, derive_seed(seed, i)); });
}

CallGraph reconstruct_pretraining_sample(std::string_view text, const std::string& trace_id) {
  auto parsed = parse_layer_sequence(text);
  std::vector<Layer> layers;
  layers.reserve(parsed.size());
  for (const auto& p : parsed) {
    if (!p.header.start_node || !p.header.start_edge_id)
      throw ParseError(ParseErrorCode::kBadHeaderField, 0, "start_node", "layer header lacks linkage fields");
    Layer l;
    l.conditions.start_node = *p.header.start_node;
    l.conditions.start_edge_id = *p.header.start_edge_id;
    l.edges = p.edges;
    l.children = p.children;
    layers.push_back(std::move(l));
  }
  NodeId service = parsed.front().header.service_id.value_or(NodeId());
  return assemble_layers(layers, trace_id, service);
}

TextSample tabular_sample(const CallGraph& g, double p_drop, std::uint64_t seed) {
  Rng rng(seed);
  AttributeKeep keep;
  keep.num_edges = !rng.bernoulli(p_drop);
  keep.depth = !rng.bernoulli(p_drop);
  keep.latency = !rng.bernoulli(p_drop);
  return encode_tabular_sample(g, rng.next(), keep);
}

std::vector<TextSample> build_tabular_corpus(std::span<const CallGraph> graphs, double p_drop, std::uint64_t seed,
                                             unsigned jobs) {
  if (p_drop < 0 || p_drop > 1) throw std::invalid_argument("p_drop must lie in [0, 1]");
  return parallel_map<TextSample>(graphs.size(), jobs,
                                  [&](std::size_t i) { return tabular_sample(graphs[i], p_drop, derive_seed(seed, i)); });
}

std::string InstructionSample::full_text() const { return system_prompt + "\n\n" + instruction + "\n\n" + output; }

bool InstructionSample::has_tag(InstructionTag tag) const {
  return std::any_of(special.begin(), special.end(), [&](const Instruction& i) { return i.tag == tag; });
}

std::vector<std::size_t> select_graphs(std::size_t n, double fraction, std::uint64_t seed) {
  if (!(fraction > 0 && fraction <= 1)) throw std::invalid_argument("fraction must lie in (0, 1]");
  auto k = static_cast<std::size_t>(std::ceil(fraction * static_cast<double>(n) - 1e-9));
  k = std::min(k, n);
  std::vector<std::size_t> idx(n);
  for (std::size_t i = 0; i < n; ++i) idx[i] = i;
  Rng rng(derive_seed(seed, 0x5E1EC7));
  rng.shuffle(idx.begin(), idx.end());
  idx.resize(k);
  std::sort(idx.begin(), idx.end());
  return idx;
}

std::string describe_conditions(const LayerConditions& c, std::uint64_t seed) {
  Rng rng(seed);
  std::string out = fill(pick(rng, kServiceTemplates), {{"S", c.service_id.str()}});
  out += ' ';
  if (c.caller == NodeId::none())
    out += fill(pick(rng, kRootTemplates), {{"N", c.start_node.str()}});
  else
    out += fill(pick(rng, kLayerTemplates), {{"N", c.start_node.str()}, {"C", c.caller.str()}});
  out += ' ';
  out += fill(pick(rng, kBudgetTemplates),
              {{"E", std::to_string(c.num_edges)}, {"D", std::to_string(c.remaining_depth)}});
  out += ' ';
  out += fill(pick(rng, kTimeTemplates),
              {{"T", std::to_string(c.start_communication_at_ms)}, {"L", std::to_string(c.latency_ms)}});
  out += ' ';
  out += fill(pick(rng, kIdTemplates), {{"I", std::to_string(c.start_edge_id)}});
  return out;
}

std::string special_instruction_text(const Instruction& instruction) {
  if (instruction.tag == InstructionTag::kHighLatency) return "Build a call graph with high latency";
  const CallTriple& t = instruction.call.value();
  return "Include an edge from " + t.source.str() + " to " + t.destination.str() + " with " + t.comm_type +
         " communication type";
}

std::optional<Instruction> choose_special(const CallGraph& g, const CorpusStats& stats, std::size_t graph_index,
                                          std::uint64_t seed) {
  std::optional<Instruction> high;
  auto p90 = stats.per_service_p90_latency.find(g.service_id);
  if (p90 != stats.per_service_p90_latency.end() && attributes(g).latency_ms >= p90->second)
    high = Instruction{InstructionTag::kHighLatency, std::nullopt};
  bool found = false;
  CallTriple t = first_uncommon(g, stats, found);
  std::optional<Instruction> uncommon;
  if (found) uncommon = Instruction{InstructionTag::kUncommonComm, t};
  if (high && uncommon) return (seed + graph_index) % 2 == 0 ? high : uncommon;
  return high ? high : uncommon;
}

std::vector<InstructionSample> build_instruction_corpus(std::span<const CallGraph> graphs, const CorpusStats& stats,
                                                        const InstructionOptions& options) {
  if (graphs.empty()) throw EmptyCorpusError("instruction corpus needs at least one graph");
  auto selected = select_graphs(graphs.size(), options.fraction, options.seed);

  auto per_graph = parallel_map<std::vector<InstructionSample>>(selected.size(), options.jobs, [&](std::size_t s) {
    std::size_t gi = selected[s];
    const CallGraph& g = graphs[gi];
    Digest origin = canonical_hash(g);
    auto special = choose_special(g, stats, gi, options.seed);
    auto layers = decompose_layers(g);

    std::size_t special_layer = layers.size();
    if (special) {
      if (special->tag == InstructionTag::kHighLatency) {
        special_layer = 0;
      } else {
        for (std::size_t li = 0; li < layers.size(); ++li)
          if (layer_has_call(layers[li], *special->call)) {
            special_layer = li;
            break;
          }
      }
    }

    std::vector<InstructionSample> out;
    out.reserve(layers.size());
    for (std::size_t li = 0; li < layers.size(); ++li) {
      const Layer& l = layers[li];
      InstructionSample sample;
      sample.system_prompt = options.system_prompt;
      sample.instruction = render_conditions(l.conditions);
      sample.instruction += '\n';
      sample.instruction += describe_conditions(l.conditions, derive_seed(options.seed, gi, li));
      if (li == special_layer) {
        sample.instruction += '\n';
        sample.instruction += special_instruction_text(*special);
        sample.special.push_back(*special);
      }
      sample.output = render_layer_completion(l.conditions, l.edges, l.children, true);
      sample.loss_mask_boundary = sample.system_prompt.size() + 2 + sample.instruction.size() + 2;
      sample.origin_hash = origin;
      sample.graph_index = gi;
      sample.layer_index = li;
      sample.conditions = l.conditions;
      out.push_back(std::move(sample));
    }
    return out;
  });

  std::vector<InstructionSample> out;
  for (auto& v : per_graph)
    for (auto& s : v) out.push_back(std::move(s));
  return out;
}

Json to_json(const TextSample& s) {
  return Json{{"text", s.text},
              {"format", std::string(to_string(s.format))},
              {"origin_hash", s.origin_hash ? Json(s.origin_hash->hex()) : Json(nullptr)}};
}

Json to_json(const InstructionSample& s) {
  Json tags = Json::array();
  Json special = Json::array();
  for (const auto& i : s.special) {
    tags.push_back(std::string(to_string(i.tag)));
    Json entry{{"tag", std::string(to_string(i.tag))}, {"text", special_instruction_text(i)}};
    if (i.call)
      entry["call"] = Json{{"source", i.call->source.str()},
                           {"destination", i.call->destination.str()},
                           {"comm_type", i.call->comm_type}};
    special.push_back(std::move(entry));
  }
  return Json{{"system_prompt", s.system_prompt},
              {"instruction", s.instruction},
              {"output", s.output},
              {"text", s.full_text()},
              {"loss_mask_boundary", s.loss_mask_boundary},
              {"tags", std::move(tags)},
              {"special", std::move(special)},
              {"origin_hash", s.origin_hash ? Json(s.origin_hash->hex()) : Json(nullptr)},
              {"graph_index", s.graph_index},
              {"layer_index", s.layer_index},
              {"format", "RECURSIVE_LAYER"}};
}

Json to_json(const CorpusHeader& h) {
  return Json{{"format_version", std::string(kFormatVersion)},
              {"kind", h.kind},
              {"p_drop", h.p_drop ? Json(*h.p_drop) : Json(nullptr)},
              {"fraction", h.fraction ? Json(*h.fraction) : Json(nullptr)},
              {"seed", h.seed},
              {"source_stats_digest", h.source_stats_digest ? Json(h.source_stats_digest->hex()) : Json(nullptr)}};
}

Digest stats_digest(const CorpusStats& stats) { return sha256(to_json(stats).dump()); }

void write_corpus(const std::string& path, const CorpusHeader& header, std::span<const TextSample> samples) {
  write_samples(path, header, samples);
}

void write_corpus(const std::string& path, const CorpusHeader& header, std::span<const InstructionSample> samples) {
  write_samples(path, header, samples);
}

}  // namespace tracegen
