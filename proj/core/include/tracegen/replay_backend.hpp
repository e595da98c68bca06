// Copyright 2026 The tracegen Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <map>
#include <string>

#include "tracegen/backend.hpp"
#include "tracegen/model.hpp"

namespace tracegen {

// Answers each layer prompt of known graphs with that layer's recorded
// completion, ignoring sampling parameters. prompt + completion equals
// encode_layer of the layer.
class ReplayBackend : public Backend {
 public:
  explicit ReplayBackend(bool with_intermediate = true) : with_intermediate_(with_intermediate) {}
  explicit ReplayBackend(const CallGraph& g, bool with_intermediate = true);

  // Throws std::invalid_argument when a prompt is already recorded with a
  // different completion.
  void add_graph(const CallGraph& g);
  void add(std::string prompt, std::string completion);

  std::string complete(std::string_view prompt, const CompletionParams& params) override;
  bool concurrent() const noexcept override { return true; }
  std::string name() const override { return "replay"; }

  std::size_t size() const noexcept { return table_.size(); }

 private:
  bool with_intermediate_;
  std::map<std::string, std::string, std::less<>> table_;
};

}  // namespace tracegen
