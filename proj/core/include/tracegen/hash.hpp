// Copyright 2026 The tracegen Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <array>
#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <string_view>

#include "tracegen/model.hpp"

namespace tracegen {

// SHA-256 digest.
struct Digest {
  std::array<std::uint8_t, 32> bytes{};

  std::string hex() const;
  static std::optional<Digest> from_hex(std::string_view hex);

  friend bool operator==(const Digest&, const Digest&) = default;
  friend auto operator<=>(const Digest&, const Digest&) = default;
};

Digest sha256(std::string_view data);

// Digest over the service id and every edge's (id, source, destination,
// type, start, finish), independent of edge order and trace id.
Digest canonical_hash(const CallGraph& g);

}  // namespace tracegen

template <>
struct std::hash<tracegen::Digest> {
  std::size_t operator()(const tracegen::Digest& d) const noexcept {
    std::size_t h = 0;
    for (int i = 0; i < 8; ++i) h = (h << 8) | d.bytes[i];
    return h;
  }
};
