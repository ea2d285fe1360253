// Copyright 2026 The cosplan Authors
// SPDX-License-Identifier: Apache-2.0

// The distro's libbenchmark_main.a ships LTO bytecode from another compiler
// release, so the entry point lives here.

#include <benchmark/benchmark.h>

BENCHMARK_MAIN();
