// Copyright 2026 The tracegen Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstddef>
#include <functional>
#include <istream>
#include <memory>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "tracegen/model.hpp"

namespace tracegen {

struct RawEdgeRecord {
  std::string trace_id;
  std::string rpc_id;
  std::optional<NodeId> upstream;
  std::optional<NodeId> downstream;
  std::optional<std::string> rpc_type;
  std::optional<double> response_time_ms;
  std::optional<double> timestamp_ms;
  std::optional<NodeId> service_id;
};

// Maps logical fields to header column names. Defaults follow the Alibaba
// 2022 microservice call-graph release.
struct TraceSchema {
  std::string trace_id = "traceid";
  std::string rpc_id = "rpc_id";
  std::string upstream = "um";
  std::string downstream = "dm";
  std::string rpc_type = "rpctype";
  std::string response_time = "rt";
  std::string timestamp = "timestamp";
  std::string service = "service";
  // Cell values treated as absent.
  std::set<std::string> missing_tokens = {"", "UNKNOWN", "UNAVAILABLE", "NAN", "NaN", "nan", "NULL", "null"};
  // 0 = detect from the header row (tab if present, else comma).
  char delimiter = 0;
};

// Streams RawEdgeRecords out of a delimited table with a header row. Rows
// whose column count differs from the header are skipped and counted.
class TraceReader {
 public:
  using LineSource = std::function<bool(std::string&)>;

  TraceReader(LineSource lines, TraceSchema schema);
  // Reads from a stream that outlives the reader.
  TraceReader(std::istream& in, TraceSchema schema);
  // Opens a file; gzip-compressed input is decompressed transparently.
  static TraceReader open(const std::string& path, TraceSchema schema);

  std::optional<RawEdgeRecord> next();
  std::vector<RawEdgeRecord> read_all();

  std::size_t malformed_rows() const noexcept { return malformed_; }
  std::size_t rows_read() const noexcept { return rows_; }

 private:
  void read_header();

  LineSource lines_;
  TraceSchema schema_;
  std::shared_ptr<void> handle_;
  char delim_ = ',';
  std::size_t columns_ = 0;
  bool header_done_ = false;
  std::size_t malformed_ = 0;
  std::size_t rows_ = 0;
  // Column index per logical field, or npos.
  std::size_t col_trace_ = 0, col_rpc_ = 0, col_up_ = 0, col_down_ = 0, col_type_ = 0, col_rt_ = 0, col_ts_ = 0,
              col_service_ = 0;
};

// Splits one delimited line; double-quoted cells may contain the delimiter.
std::vector<std::string> split_row(const std::string& line, char delim);

}  // namespace tracegen
