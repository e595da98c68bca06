// Copyright 2026 The tracegen Authors
// SPDX-License-Identifier: Apache-2.0

// Synthetic Alibaba-style trace tables and small hand-built graphs.

#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "tracegen/model.hpp"

namespace tracegen::testing {

struct FixtureOptions {
  std::size_t traces = 12000;
  std::uint64_t seed = 20240611;
  std::size_t services = 24;
  std::size_t microservices = 400;
  // Per-trace probabilities of each kind of damage.
  double duplicate_rate = 0.02;
  double missing_dm_rate = 0.02;
  double malformed_rate = 0.01;
  double time_violation_rate = 0.01;
  double double_root_rate = 0.005;
};

struct FixtureTally {
  std::size_t traces = 0;  // distinct trace ids written
  std::size_t rows = 0;    // data rows, malformed ones included
  std::size_t malformed_rows = 0;
  std::size_t duplicates = 0;
  std::size_t expected_disconnected = 0;
  std::size_t expected_time_violations = 0;
  std::size_t expected_double_roots = 0;
};

// Header plus rows in the column layout of the 2022 microservice release.
std::string generate_trace_csv(const FixtureOptions& options, FixtureTally* tally = nullptr);

// The default fixture written once, ingested, deduplicated and cached.
const std::vector<CallGraph>& fixture_graphs();
const std::filesystem::path& fixture_csv_path();
const FixtureTally& fixture_tally();

class TempDir {
 public:
  TempDir();
  ~TempDir();
  TempDir(const TempDir&) = delete;
  TempDir& operator=(const TempDir&) = delete;

  const std::filesystem::path& path() const noexcept { return path_; }
  std::string file(const std::string& name) const { return (path_ / name).string(); }

 private:
  std::filesystem::path path_;
};

std::string slurp(const std::string& path);

// ---- hand-built graphs ---------------------------------------------------

Edge edge(const std::string& id, const std::string& src, const std::string& dst, const std::string& type,
          std::int64_t start, std::int64_t finish);
CallGraph graph_of(std::vector<Edge> edges, const std::string& service = "S_000000001",
                   const std::string& trace = "t");

// Client->A->B->C, times (0,10) (2,8) (3,7).
CallGraph chain3();
// Root Client->A with children A->B and A->C.
CallGraph star2();
// Root with `k` children under it.
CallGraph star(std::size_t k);
// A root layer, a two-edge layer below it, and one more layer under the
// second of those.
CallGraph three_layer_graph();

}  // namespace tracegen::testing
