// Copyright 2026 The ATL Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

// Run configuration shared by every CLI command.
//
//   {
//     "schema_version": 1,
//     "seed": 1,
//     "world":      { WorldParams fields },
//     "sizes":      { "n_train", "n_test", "n_external" },
//     "split":      { "mode", "unseen_count", "novel_fraction", "unseen_objects" },
//     "train":      { TrainConfig fields },
//     "bank":       { "M" },
//     "affordance": { "hoi_threshold", "keep_threshold", "queries_per_object" },
//     "gradcheck":  { "configs", "max_dim", "step" },
//     "trends":     { "seeds", "novel_fraction", "bank_sweep" }
//   }
//
// Every section is optional; missing fields keep their defaults. Unknown keys
// at any level are rejected with ConfigError naming the key.

#include <cstdint>
#include <vector>

#include "atl/experiment.hpp"
#include "atl/pipeline.hpp"
#include "atl/serialize.hpp"
#include "atl/split.hpp"
#include "atl/synthgen.hpp"

namespace atl {

inline constexpr int kSchemaVersion = 1;

struct SplitConfig {
  SplitMode mode = SplitMode::kNovelObject;
  int unseen_count = 0;  // composition modes; 0 = 20% of categories
  double novel_fraction = 0.2;
  std::vector<int> unseen_objects;  // novel-object mode; empty = draw at random
};

struct AffordanceConfig {
  double hoi_threshold = kDefaultHoiThreshold;
  double keep_threshold = kDefaultKeepThreshold;
  int queries_per_object = 25;
};

struct GradcheckConfig {
  int configs = 100;
  int max_dim = 32;
  double step = 1e-5;
};

struct TrendsConfig {
  std::vector<std::uint64_t> seeds{1, 2, 3, 4, 5};
  double novel_fraction = 0.2;
  std::vector<int> bank_sweep{20};
};

struct RunConfig {
  std::uint64_t seed = 1;
  WorldParams world;
  DatasetSizes sizes;
  SplitConfig split;
  TrainConfig train = desk_train_config();
  int bank_cap = kDefaultBankCap;
  AffordanceConfig affordance;
  GradcheckConfig gradcheck;
  TrendsConfig trends;
};

// Throws ConfigError on a missing or wrong schema_version, unknown keys,
// wrongly typed values or values outside their ranges.
RunConfig run_config_from_json(const Json& j);
Json to_json(const RunConfig& cfg);

void validate(const RunConfig& cfg);

}  // namespace atl
