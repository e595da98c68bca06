// Copyright 2026 The tracegen Authors
// SPDX-License-Identifier: Apache-2.0

#include "tracegen/hash.hpp"

#include <openssl/sha.h>

#include <algorithm>
#include <tuple>
#include <vector>

namespace tracegen {
namespace {

void put_field(std::string& out, std::string_view field) {
  out += std::to_string(field.size());
  out += ':';
  out += field;
}

int hex_value(char c) {
  if (c >= '0' && c <= '9') return c - '0';
  if (c >= 'a' && c <= 'f') return c - 'a' + 10;
  if (c >= 'A' && c <= 'F') return c - 'A' + 10;
  return -1;
}

}  // namespace

std::string Digest::hex() const {
  static constexpr char kDigits[] = "0123456789abcdef";
  std::string out;
  out.reserve(64);
  for (auto b : bytes) {
    out += kDigits[b >> 4];
    out += kDigits[b & 0xF];
  }
  return out;
}

std::optional<Digest> Digest::from_hex(std::string_view hex) {
  if (hex.size() != 64) return std::nullopt;
  Digest d;
  for (std::size_t i = 0; i < 32; ++i) {
    int hi = hex_value(hex[2 * i]), lo = hex_value(hex[2 * i + 1]);
    if (hi < 0 || lo < 0) return std::nullopt;
    d.bytes[i] = static_cast<std::uint8_t>(hi * 16 + lo);
  }
  return d;
}

Digest sha256(std::string_view data) {
  Digest d;
  SHA256(reinterpret_cast<const unsigned char*>(data.data()), data.size(), d.bytes.data());
  return d;
}

Digest canonical_hash(const CallGraph& g) {
  std::vector<const Edge*> edges;
  edges.reserve(g.edges.size());
  for (const auto& e : g.edges) edges.push_back(&e);
  std::sort(edges.begin(), edges.end(), [](const Edge* a, const Edge* b) {
    return std::tie(a->edge_id, a->source, a->destination, a->comm_type, a->start_ms, a->finish_ms) <
           std::tie(b->edge_id, b->source, b->destination, b->comm_type, b->start_ms, b->finish_ms);
  });

  std::string buf;
  buf.reserve(64 + edges.size() * 64);
  put_field(buf, "callgraph/v1");
  put_field(buf, g.service_id.str());
  for (const Edge* e : edges) {
    put_field(buf, e->edge_id.str());
    put_field(buf, e->source.str());
    put_field(buf, e->destination.str());
    put_field(buf, e->comm_type);
    put_field(buf, std::to_string(e->start_ms));
    put_field(buf, std::to_string(e->finish_ms));
  }
  return sha256(buf);
}

}  // namespace tracegen
