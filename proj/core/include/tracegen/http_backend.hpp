// Copyright 2026 The tracegen Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <chrono>
#include <condition_variable>
#include <mutex>
#include <string>
#include <vector>

#include "tracegen/backend.hpp"

namespace tracegen {

struct HttpBackendOptions {
  // Full endpoint, e.g. "http://localhost:8000/v1/complete".
  std::string url;
  // Sent as "Authorization: Bearer <token>" when non-empty.
  std::string token;
  std::chrono::milliseconds timeout{30000};
  int max_retries = 3;
  std::chrono::milliseconds backoff{200};  // doubled after every failed try
  unsigned max_in_flight = 4;
  std::vector<std::string> stop = {"</subgraph>", "</edges>"};

  // url from TRACEGEN_BACKEND_URL and token from TRACEGEN_BACKEND_TOKEN;
  // unset variables leave the defaults untouched.
  static HttpBackendOptions from_env();
};

// POSTs {prompt, temperature, top_k, max_tokens, seed, stop} as JSON and
// reads the completion from the "text" field of the reply. Connection errors,
// timeouts and 5xx replies are retried with exponential backoff.
class HttpBackend : public Backend {
 public:
  explicit HttpBackend(HttpBackendOptions options);

  std::string complete(std::string_view prompt, const CompletionParams& params) override;
  bool concurrent() const noexcept override { return true; }
  std::string name() const override { return "http"; }

  // The request body for one call.
  std::string request_body(std::string_view prompt, const CompletionParams& params) const;

 private:
  HttpBackendOptions options_;
  std::string base_;  // scheme://host:port
  std::string path_;
  std::mutex mu_;
  std::condition_variable cv_;
  unsigned in_flight_ = 0;
};

}  // namespace tracegen
