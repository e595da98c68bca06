// Copyright 2026 The tracegen Authors
// SPDX-License-Identifier: Apache-2.0

#include "tracegen/trace_reader.hpp"

#include <zlib.h>

#include <charconv>
#include <stdexcept>
#include <string>

namespace tracegen {
namespace {

constexpr std::size_t kNoColumn = static_cast<std::size_t>(-1);

std::size_t find_column(const std::vector<std::string>& header, const std::string& name) {
  if (name.empty()) return kNoColumn;
  for (std::size_t i = 0; i < header.size(); ++i)
    if (header[i] == name) return i;
  return kNoColumn;
}

void strip_eol(std::string& s) {
  while (!s.empty() && (s.back() == '\n' || s.back() == '\r')) s.pop_back();
}

std::optional<double> parse_number(const std::string& cell) {
  double v = 0;
  const char* begin = cell.data();
  const char* end = cell.data() + cell.size();
  while (begin < end && *begin == ' ') ++begin;
  auto [ptr, ec] = std::from_chars(begin, end, v);
  if (ec != std::errc() || ptr != end) return std::nullopt;
  return v;
}

}  // namespace

std::vector<std::string> split_row(const std::string& line, char delim) {
  std::vector<std::string> out;
  std::string cell;
  bool quoted = false;
  for (std::size_t i = 0; i < line.size(); ++i) {
    char c = line[i];
    if (quoted) {
      if (c == '"' && i + 1 < line.size() && line[i + 1] == '"') {
        cell += '"';
        ++i;
      } else if (c == '"') {
        quoted = false;
      } else {
        cell += c;
      }
    } else if (c == '"' && cell.empty()) {
      quoted = true;
    } else if (c == delim) {
      out.push_back(std::move(cell));
      cell.clear();
    } else {
      cell += c;
    }
  }
  out.push_back(std::move(cell));
  return out;
}

TraceReader::TraceReader(LineSource lines, TraceSchema schema) : lines_(std::move(lines)), schema_(std::move(schema)) {}

TraceReader::TraceReader(std::istream& in, TraceSchema schema)
    : TraceReader([&in](std::string& line) { return static_cast<bool>(std::getline(in, line)); }, std::move(schema)) {}

TraceReader TraceReader::open(const std::string& path, TraceSchema schema) {
  gzFile f = gzopen(path.c_str(), "rb");
  if (!f) throw std::runtime_error("cannot open trace file '" + path + "'");
  std::shared_ptr<void> handle(f, [](void* p) { gzclose(static_cast<gzFile>(p)); });
  TraceReader reader(
      [f](std::string& line) {
        line.clear();
        char buf[8192];
        while (gzgets(f, buf, sizeof(buf))) {
          line += buf;
          if (!line.empty() && line.back() == '\n') return true;
        }
        return !line.empty();
      },
      std::move(schema));
  reader.handle_ = std::move(handle);
  return reader;
}

void TraceReader::read_header() {
  header_done_ = true;
  std::string line;
  if (!lines_(line)) return;
  strip_eol(line);
  delim_ = schema_.delimiter ? schema_.delimiter : (line.find('\t') != std::string::npos ? '\t' : ',');
  auto header = split_row(line, delim_);
  columns_ = header.size();
  col_trace_ = find_column(header, schema_.trace_id);
  col_rpc_ = find_column(header, schema_.rpc_id);
  col_up_ = find_column(header, schema_.upstream);
  col_down_ = find_column(header, schema_.downstream);
  col_type_ = find_column(header, schema_.rpc_type);
  col_rt_ = find_column(header, schema_.response_time);
  col_ts_ = find_column(header, schema_.timestamp);
  col_service_ = find_column(header, schema_.service);
  if (col_trace_ == kNoColumn || col_rpc_ == kNoColumn)
    throw std::runtime_error("trace header lacks the trace id or rpc id column");
}

std::optional<RawEdgeRecord> TraceReader::next() {
  if (!header_done_) read_header();
  std::string line;
  while (lines_(line)) {
    strip_eol(line);
    if (line.empty()) continue;
    auto cells = split_row(line, delim_);
    if (cells.size() != columns_) {
      ++malformed_;
      continue;
    }
    ++rows_;
    auto cell = [&](std::size_t col) -> const std::string* {
      if (col == kNoColumn) return nullptr;
      const std::string& v = cells[col];
      if (schema_.missing_tokens.count(v)) return nullptr;
      return &v;
    };
    auto node = [&](std::size_t col) -> std::optional<NodeId> {
      if (auto* v = cell(col)) return NodeId(*v);
      return std::nullopt;
    };
    auto number = [&](std::size_t col) -> std::optional<double> {
      if (auto* v = cell(col)) return parse_number(*v);
      return std::nullopt;
    };

    RawEdgeRecord r;
    r.trace_id = cells[col_trace_];
    r.rpc_id = cells[col_rpc_];
    r.upstream = node(col_up_);
    r.downstream = node(col_down_);
    if (auto* v = cell(col_type_)) r.rpc_type = *v;
    r.response_time_ms = number(col_rt_);
    r.timestamp_ms = number(col_ts_);
    r.service_id = node(col_service_);
    return r;
  }
  return std::nullopt;
}

std::vector<RawEdgeRecord> TraceReader::read_all() {
  std::vector<RawEdgeRecord> out;
  while (auto r = next()) out.push_back(std::move(*r));
  return out;
}

}  // namespace tracegen
