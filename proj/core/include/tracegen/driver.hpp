// Copyright 2026 The tracegen Authors
// SPDX-License-Identifier: Apache-2.0

// Recursive layer-by-layer generation against a completion backend.

#pragma once

#include <cstdint>
#include <deque>
#include <optional>
#include <string>
#include <vector>

#include "tracegen/backend.hpp"
#include "tracegen/model.hpp"
#include "tracegen/validator.hpp"

namespace tracegen {

struct GenerationLimits {
  std::size_t max_layers = 256;  // backend calls per session, retries excluded
  int max_retries = 4;
  bool depth_first = false;  // FIFO (breadth-first) by default
  LayerCheckOptions layer_checks;
};

enum class SessionStatus { kRunning, kDone, kFailed };
enum class FailureReason { kRetryExhausted, kLayerBudgetExceeded, kAssemblyInvalid };
std::string_view to_string(SessionStatus s) noexcept;
std::string_view to_string(FailureReason r) noexcept;

struct PendingLayer {
  LayerConditions conditions;
  std::vector<std::uint32_t> parent_path;  // empty for the root layer
};

struct ProducedLayer {
  LayerConditions conditions;
  std::vector<LayerEdge> edges;
  std::vector<ChildConditions> children;
  std::vector<std::uint32_t> parent_path;
  int attempts = 0;
};

struct GenerationSession {
  LayerConditions prompt;
  std::deque<PendingLayer> pending;
  std::vector<ProducedLayer> produced;
  std::size_t retries_used = 0;
  SessionStatus status = SessionStatus::kRunning;
  std::optional<FailureReason> failure;
  std::string failure_detail;
  // Violations of the last rejected attempt, or of the assembled graph.
  ValidationReport violations;
  std::optional<AccuracyVerdict> verdict;
};

struct GenerationResult {
  std::optional<CallGraph> graph;  // set when status is kDone
  GenerationSession session;

  bool ok() const noexcept { return session.status == SessionStatus::kDone; }
};

// Pops pending conditions, prompts the backend, validates each layer and
// retries rejected ones with seed derive_seed(params.seed, layer) + attempt.
// Child conditions are queued with their lineage; once the queue drains the
// layers are assembled and checked against the prompt. BackendError
// propagates to the caller.
GenerationResult recursive_generate(Backend& backend, const LayerConditions& prompt, const CompletionParams& params,
                                    const GenerationLimits& limits = {}, const std::string& trace_id = "generated");

}  // namespace tracegen
