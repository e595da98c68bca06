// Copyright 2026 The tracegen Authors
// SPDX-License-Identifier: Apache-2.0

#include "tracegen/backend.hpp"

namespace tracegen {

Backend::~Backend() = default;

}  // namespace tracegen
