// Copyright 2026 The ATL Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <random>
#include <string_view>

namespace atl {

using Rng = std::mt19937_64;

// splitmix64 finalizer.
std::uint64_t mix64(std::uint64_t x);

// Seed of a named sub-stream: mix64(master ^ fnv1a(name)). Named streams used
// across the project are "data", "init", "batching", "bank", "split", "query".
std::uint64_t stream_seed(std::uint64_t master, std::string_view name);

// Seed of the index-th draw within a stream; generated items can be produced
// in any order (or in parallel) with identical results.
std::uint64_t item_seed(std::uint64_t stream, std::uint64_t index);

Rng make_rng(std::uint64_t master, std::string_view name);

double uniform(Rng& rng, double lo, double hi);
double gaussian(Rng& rng, double sigma);
std::size_t uniform_index(Rng& rng, std::size_t n);

}  // namespace atl
