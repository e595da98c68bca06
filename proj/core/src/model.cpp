// Copyright 2026 The tracegen Authors
// SPDX-License-Identifier: Apache-2.0

#include "tracegen/model.hpp"

#include <algorithm>
#include <array>
#include <charconv>
#include <utility>

namespace tracegen {
namespace {

bool all_digits(std::string_view s) {
  return !s.empty() && std::all_of(s.begin(), s.end(), [](char c) { return c >= '0' && c <= '9'; });
}

constexpr std::array<std::pair<ViolationCode, std::string_view>, 21> kCodeNames = {{
    {ViolationCode::kGRoot, "G_ROOT"},
    {ViolationCode::kGParentLink, "G_PARENT_LINK"},
    {ViolationCode::kGSourceMatch, "G_SOURCE_MATCH"},
    {ViolationCode::kGTimeNest, "G_TIME_NEST"},
    {ViolationCode::kGEdgeTime, "G_EDGE_TIME"},
    {ViolationCode::kGDupId, "G_DUP_ID"},
    {ViolationCode::kFFormat, "F_FORMAT"},
    {ViolationCode::kEFields, "E_FIELDS"},
    {ViolationCode::kECount, "E_COUNT"},
    {ViolationCode::kEStartLow, "E_START_LOW"},
    {ViolationCode::kEStartOrder, "E_START_ORDER"},
    {ViolationCode::kEFinishLatency, "E_FINISH_LATENCY"},
    {ViolationCode::kSUnexpected, "S_UNEXPECTED"},
    {ViolationCode::kSEdgeRef, "S_EDGE_REF"},
    {ViolationCode::kSDepthLt, "S_DEPTH_LT"},
    {ViolationCode::kSDepthOne, "S_DEPTH_ONE"},
    {ViolationCode::kSStartNode, "S_START_NODE"},
    {ViolationCode::kSCaller, "S_CALLER"},
    {ViolationCode::kSLatency, "S_LATENCY"},
    {ViolationCode::kSStartTime, "S_START_TIME"},
    {ViolationCode::kTEdgeSum, "T_EDGE_SUM"},
}};

}  // namespace

NodeId::Kind NodeId::kind() const noexcept {
  std::string_view s = name_;
  if (s == "Client") return Kind::kClient;
  if (s == "None") return Kind::kNone;
  if (s.starts_with("MS_") && all_digits(s.substr(3))) return Kind::kMicroservice;
  if (s.starts_with("S_") && all_digits(s.substr(2))) return Kind::kService;
  return Kind::kOther;
}

std::optional<EdgeId> EdgeId::try_parse(std::string_view text) noexcept {
  if (text.empty()) return std::nullopt;
  std::vector<std::uint32_t> path;
  std::size_t pos = 0;
  while (true) {
    std::size_t dot = text.find('.', pos);
    std::string_view part = text.substr(pos, dot == std::string_view::npos ? std::string_view::npos : dot - pos);
    if (!all_digits(part)) return std::nullopt;
    std::uint32_t value = 0;
    auto [ptr, ec] = std::from_chars(part.data(), part.data() + part.size(), value);
    if (ec != std::errc() || ptr != part.data() + part.size()) return std::nullopt;
    path.push_back(value);
    if (dot == std::string_view::npos) break;
    pos = dot + 1;
  }
  return EdgeId(std::move(path));
}

EdgeId EdgeId::parse(std::string_view text) {
  auto id = try_parse(text);
  if (!id) throw std::invalid_argument("not a dot-decimal edge id: '" + std::string(text) + "'");
  return *id;
}

EdgeId EdgeId::parent() const {
  if (path_.size() <= 1) throw std::logic_error("root edge id has no parent");
  return EdgeId(std::vector<std::uint32_t>(path_.begin(), path_.end() - 1));
}

EdgeId EdgeId::child(std::uint32_t index) const {
  auto p = path_;
  p.push_back(index);
  return EdgeId(std::move(p));
}

std::string EdgeId::str() const {
  std::string out;
  for (std::size_t i = 0; i < path_.size(); ++i) {
    if (i) out += '.';
    out += std::to_string(path_[i]);
  }
  return out;
}

std::string_view to_string(ViolationCode code) noexcept {
  for (const auto& [c, name] : kCodeNames)
    if (c == code) return name;
  return "UNKNOWN";
}

std::optional<ViolationCode> violation_code_from_string(std::string_view text) noexcept {
  for (const auto& [c, name] : kCodeNames)
    if (name == text) return c;
  return std::nullopt;
}

const std::vector<ViolationCode>& layer_violation_catalog() {
  static const std::vector<ViolationCode> catalog = {
      ViolationCode::kFFormat,     ViolationCode::kEFields,      ViolationCode::kECount,
      ViolationCode::kEStartLow,   ViolationCode::kEStartOrder,  ViolationCode::kEFinishLatency,
      ViolationCode::kSUnexpected, ViolationCode::kSEdgeRef,     ViolationCode::kSDepthLt,
      ViolationCode::kSDepthOne,   ViolationCode::kSStartNode,   ViolationCode::kSCaller,
      ViolationCode::kSLatency,    ViolationCode::kSStartTime,   ViolationCode::kTEdgeSum,
  };
  return catalog;
}

bool contains(const ValidationReport& report, ViolationCode code) {
  return std::any_of(report.begin(), report.end(), [code](const Violation& v) { return v.code == code; });
}

}  // namespace tracegen
