// Copyright 2026 The tracegen Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include "tracegen/backend.hpp"
#include "tracegen/model.hpp"
#include "tracegen/probabilistic.hpp"

namespace tracegen {

// Answers a layer prompt with a layer drawn from a fitted model. Layers are
// built to fit the prompt's budget, so a driver using this backend only
// fails on prompts that cannot be satisfied at all. Draws are seeded by
// (params.seed, prompt text).
class StatisticalBackend : public Backend {
 public:
  explicit StatisticalBackend(ProbModel model, bool with_intermediate = true)
      : model_(std::move(model)), with_intermediate_(with_intermediate) {}

  std::string complete(std::string_view prompt, const CompletionParams& params) override;
  bool concurrent() const noexcept override { return true; }
  std::string name() const override { return "statistical"; }

  // The sampled layer for already-parsed conditions. Throws UnparsablePrompt
  // when no layer can satisfy them.
  Layer sample_layer(const LayerConditions& conds, const CompletionParams& params, std::uint64_t seed) const;

 private:
  ProbModel model_;
  bool with_intermediate_;
};

// Whether some valid graph has exactly this many edges and this depth.
bool graph_shape_satisfiable(std::int64_t num_edges, std::int64_t depth) noexcept;

}  // namespace tracegen
