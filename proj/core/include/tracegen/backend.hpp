// Copyright 2026 The tracegen Authors
// SPDX-License-Identifier: Apache-2.0

// Text-completion backends used by the generation driver.

#pragma once

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>

namespace tracegen {

struct CompletionParams {
  double temperature = 0.8;
  std::optional<int> top_k = 50;  // nullopt = unbounded
  int max_tokens = 2048;
  std::uint64_t seed = 0;
};

class BackendError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};
class BackendUnavailable : public BackendError {
 public:
  using BackendError::BackendError;
};
class BackendTimeout : public BackendError {
 public:
  using BackendError::BackendError;
};
class EmptyCompletion : public BackendError {
 public:
  using BackendError::BackendError;
};
class UnparsablePrompt : public BackendError {
 public:
  using BackendError::BackendError;
};

class Backend {
 public:
  virtual ~Backend();

  // Returns the continuation of `prompt` (the text after it).
  virtual std::string complete(std::string_view prompt, const CompletionParams& params) = 0;

  // Whether complete() may be called from several threads at once.
  virtual bool concurrent() const noexcept { return false; }
  virtual std::string name() const = 0;
};

}  // namespace tracegen
