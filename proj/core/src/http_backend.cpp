// Copyright 2026 The tracegen Authors
// SPDX-License-Identifier: Apache-2.0

#define CPPHTTPLIB_OPENSSL_SUPPORT
#include "tracegen/http_backend.hpp"

#include <httplib.h>

#include <cstdlib>
#include <thread>

#include "tracegen/graph_json.hpp"

namespace tracegen {
namespace {

// RAII slot in the in-flight window.
class Slot {
 public:
  Slot(std::mutex& mu, std::condition_variable& cv, unsigned& count, unsigned cap) : mu_(mu), cv_(cv), count_(count) {
    std::unique_lock lock(mu_);
    cv_.wait(lock, [&] { return count_ < cap; });
    ++count_;
  }
  ~Slot() {
    {
      std::lock_guard lock(mu_);
      --count_;
    }
    cv_.notify_one();
  }
  Slot(const Slot&) = delete;
  Slot& operator=(const Slot&) = delete;

 private:
  std::mutex& mu_;
  std::condition_variable& cv_;
  unsigned& count_;
};

}  // namespace

HttpBackendOptions HttpBackendOptions::from_env() {
  HttpBackendOptions o;
  if (const char* url = std::getenv("TRACEGEN_BACKEND_URL")) o.url = url;
  if (const char* token = std::getenv("TRACEGEN_BACKEND_TOKEN")) o.token = token;
  return o;
}

HttpBackend::HttpBackend(HttpBackendOptions options) : options_(std::move(options)) {
  const std::string& url = options_.url;
  auto scheme = url.find("://");
  if (scheme == std::string::npos || url.empty())
    throw std::invalid_argument("backend url must look like http://host:port/path, got '" + url + "'");
  auto slash = url.find('/', scheme + 3);
  base_ = url.substr(0, slash);
  path_ = slash == std::string::npos ? "/" : url.substr(slash);
  if (options_.max_in_flight == 0) options_.max_in_flight = 1;
}

std::string HttpBackend::request_body(std::string_view prompt, const CompletionParams& params) const {
  Json body{{"prompt", std::string(prompt)},
            {"temperature", params.temperature},
            {"top_k", params.top_k ? Json(*params.top_k) : Json(nullptr)},
            {"max_tokens", params.max_tokens},
            {"seed", params.seed},
            {"stop", options_.stop}};
  return body.dump();
}

std::string HttpBackend::complete(std::string_view prompt, const CompletionParams& params) {
  if (prompt.empty()) throw UnparsablePrompt("empty prompt");
  Slot slot(mu_, cv_, in_flight_, options_.max_in_flight);

  httplib::Client client(base_);
  client.set_connection_timeout(options_.timeout);
  client.set_read_timeout(options_.timeout);
  client.set_write_timeout(options_.timeout);
  if (!options_.token.empty()) client.set_bearer_token_auth(options_.token);
  const std::string body = request_body(prompt, params);

  auto backoff = options_.backoff;
  std::string last_error;
  bool timed_out = false;
  for (int attempt = 0; attempt <= options_.max_retries; ++attempt) {
    if (attempt > 0) {
      std::this_thread::sleep_for(backoff);
      backoff *= 2;
    }
    auto res = client.Post(path_, body, "application/json");
    if (!res) {
      auto err = res.error();
      timed_out = err == httplib::Error::Read || err == httplib::Error::ConnectionTimeout;
      last_error = httplib::to_string(err);
      continue;
    }
    if (res->status >= 500) {
      timed_out = false;
      last_error = "HTTP " + std::to_string(res->status);
      continue;
    }
    if (res->status != 200)
      throw BackendUnavailable(options_.url + " answered HTTP " + std::to_string(res->status) + ": " + res->body);
    Json reply;
    try {
      reply = Json::parse(res->body);
    } catch (const std::exception& e) {
      throw BackendUnavailable(options_.url + " returned invalid JSON: " + e.what());
    }
    if (!reply.is_object() || !reply.contains("text") || !reply["text"].is_string())
      throw BackendUnavailable(options_.url + " reply lacks a string 'text' field");
    std::string text = reply["text"].get<std::string>();
    if (text.find_first_not_of(" \t\r\n") == std::string::npos) throw EmptyCompletion(options_.url + " returned no text");
    return text;
  }
  std::string msg = options_.url + ": " + last_error + " after " + std::to_string(options_.max_retries + 1) + " tries";
  if (timed_out) throw BackendTimeout(msg);
  throw BackendUnavailable(msg);
}

}  // namespace tracegen
