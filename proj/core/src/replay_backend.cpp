// Copyright 2026 The tracegen Authors
// SPDX-License-Identifier: Apache-2.0

#include "tracegen/replay_backend.hpp"

#include <stdexcept>

#include "tracegen/codec.hpp"
#include "tracegen/layers.hpp"

namespace tracegen {

ReplayBackend::ReplayBackend(const CallGraph& g, bool with_intermediate) : with_intermediate_(with_intermediate) {
  add_graph(g);
}

void ReplayBackend::add_graph(const CallGraph& g) {
  for (const Layer& l : decompose_layers(g))
    add(render_prompt(l.conditions), render_layer_completion(l.conditions, l.edges, l.children, with_intermediate_));
}

void ReplayBackend::add(std::string prompt, std::string completion) {
  auto [it, inserted] = table_.emplace(std::move(prompt), completion);
  if (!inserted && it->second != completion)
    throw std::invalid_argument("replay: conflicting completions for one prompt");
}

std::string ReplayBackend::complete(std::string_view prompt, const CompletionParams&) {
  auto it = table_.find(prompt);
  if (it == table_.end()) throw UnparsablePrompt("replay: no recorded completion for this prompt");
  return it->second;
}

}  // namespace tracegen
