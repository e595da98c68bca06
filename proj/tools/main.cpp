// Copyright 2026 The tracegen Authors
// SPDX-License-Identifier: Apache-2.0

#include "cli.hpp"

int main(int argc, char** argv) { return tracegen::cli::run(argc, argv); }
