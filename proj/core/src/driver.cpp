// Copyright 2026 The tracegen Authors
// SPDX-License-Identifier: Apache-2.0

#include "tracegen/driver.hpp"

#include "tracegen/codec.hpp"
#include "tracegen/layers.hpp"
#include "tracegen/rng.hpp"

namespace tracegen {
namespace {

std::string codes(const ValidationReport& report) {
  std::string out;
  for (const auto& v : report) {
    if (!out.empty()) out += ',';
    out += to_string(v.code);
  }
  return out;
}

void fail(GenerationSession& s, FailureReason reason, std::string detail) {
  s.status = SessionStatus::kFailed;
  s.failure = reason;
  s.failure_detail = std::move(detail);
}

}  // namespace

std::string_view to_string(SessionStatus s) noexcept {
  switch (s) {
    case SessionStatus::kRunning: return "RUNNING";
    case SessionStatus::kDone: return "DONE";
    case SessionStatus::kFailed: return "FAILED";
  }
  return "?";
}

std::string_view to_string(FailureReason r) noexcept {
  switch (r) {
    case FailureReason::kRetryExhausted: return "RetryExhausted";
    case FailureReason::kLayerBudgetExceeded: return "LayerBudgetExceeded";
    case FailureReason::kAssemblyInvalid: return "AssemblyInvalid";
  }
  return "?";
}

GenerationResult recursive_generate(Backend& backend, const LayerConditions& prompt, const CompletionParams& params,
                                    const GenerationLimits& limits, const std::string& trace_id) {
  GenerationResult result;
  GenerationSession& s = result.session;
  s.prompt = prompt;
  s.pending.push_back({prompt, {}});
  GraphAssembler assembler(trace_id, prompt.service_id);

  while (!s.pending.empty()) {
    if (s.produced.size() >= limits.max_layers) {
      fail(s, FailureReason::kLayerBudgetExceeded,
           std::to_string(s.pending.size()) + " layers still pending after " + std::to_string(limits.max_layers));
      return result;
    }
    PendingLayer next;
    if (limits.depth_first) {
      next = std::move(s.pending.back());
      s.pending.pop_back();
    } else {
      next = std::move(s.pending.front());
      s.pending.pop_front();
    }

    const std::string text_prompt = render_prompt(next.conditions);
    const std::uint64_t layer_seed = derive_seed(params.seed, s.produced.size());
    ParsedLayer parsed;
    bool accepted = false;
    int attempt = 0;
    for (; attempt <= limits.max_retries; ++attempt) {
      CompletionParams p = params;
      p.seed = layer_seed + static_cast<std::uint64_t>(attempt);
      std::string completion = backend.complete(text_prompt, p);
      ValidationReport report = validate_layer_text(completion, next.conditions, limits.layer_checks, &parsed);
      if (report.empty()) {
        accepted = true;
        break;
      }
      s.violations = std::move(report);
      if (attempt < limits.max_retries) ++s.retries_used;
    }
    if (!accepted) {
      fail(s, FailureReason::kRetryExhausted,
           "layer at edge " + std::to_string(next.conditions.start_edge_id) + " rejected " +
               std::to_string(attempt) + " times: " + codes(s.violations));
      return result;
    }
    s.violations.clear();

    auto ids = assembler.add_layer(next.parent_path, next.conditions.start_node, parsed.edges);
    for (const auto& child : parsed.children) {
      std::size_t k = 0;
      while (parsed.edges[k].flat_edge_id != child.parent_edge_id) ++k;  // validated above
      s.pending.push_back({child.conditions, ids[k].path()});
    }
    s.produced.push_back({next.conditions, std::move(parsed.edges), std::move(parsed.children),
                          std::move(next.parent_path), attempt + 1});
  }

  CallGraph g = assembler.take();
  AccuracyVerdict verdict = validate_generation(g, GenerationTarget::from(prompt));
  s.verdict = verdict;
  if (!verdict.valid) {
    s.violations = verdict.violations;
    fail(s, FailureReason::kAssemblyInvalid,
         "assembled graph rejected" + (verdict.violations.empty() ? std::string(": attribute mismatch")
                                                                  : ": " + codes(verdict.violations)));
    return result;
  }
  s.status = SessionStatus::kDone;
  result.graph = std::move(g);
  return result;
}

}  // namespace tracegen
