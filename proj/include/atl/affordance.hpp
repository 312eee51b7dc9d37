// Copyright 2026 The ATL Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

// Affordance feature bank and bank-probing affordance recognition.
//
// The bank keeps up to M verb features per verb. To recognize the
// affordances of an object feature, every banked verb feature is paired with
// it and run through the HOI classifier; HOI scores are reduced to verb scores
// (max over the verb's categories) and only the banked entry's own verb is
// counted. The affordance probability of verb i is F_i / S_i.

#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "atl/pipeline.hpp"
#include "atl/rng.hpp"
#include "atl/synthgen.hpp"
#include "atl/taxonomy.hpp"

namespace atl {

inline constexpr int kDefaultBankCap = 100;
inline constexpr double kDefaultKeepThreshold = 0.5;
inline constexpr double kDefaultHoiThreshold = 0.5;

struct AffordanceBank {
  int cap = kDefaultBankCap;  // M
  int feat_dim = 0;
  std::uint64_t source_seed = 0;
  std::vector<std::vector<std::vector<double>>> entries;  // [verb][k] -> feature

  std::size_t count(int verb) const { return entries.at(verb).size(); }  // S_i
  bool empty() const;
};

void validate(const AffordanceBank& bank, const Taxonomy& tax);

// Uniformly samples up to cap verb features per verb among the training
// instances whose label carries that verb. No-interaction verbs stay empty.
AffordanceBank build_bank(std::span<const HoiInstance> train_set, const Taxonomy& tax,
                          int cap, std::uint64_t seed);

struct AffordanceScores {
  std::vector<std::int64_t> hits;              // F_i
  std::vector<std::int64_t> bank_counts;       // S_i
  std::vector<std::optional<double>> score;    // F_i / S_i; empty when S_i = 0
  std::vector<int> kept;                       // verbs with score > keep_threshold

  // Score with undefined entries mapped to nullopt; convenience for ranking.
  std::optional<double> probability(int verb) const { return score.at(verb); }
};

// Rejects an all-empty bank, thresholds outside [0, 1] and dimension
// mismatches.
AffordanceScores recognize(std::span<const double> object_feat, const AffordanceBank& bank,
                           const HoiModel& model, const Taxonomy& tax,
                           double hoi_threshold = kDefaultHoiThreshold,
                           double keep_threshold = kDefaultKeepThreshold);

// Per-verb scores from raw per-category HOI probabilities of one bank entry:
// max over the verb's categories.
std::vector<double> verb_scores(std::span<const double> hoi_probs, const Taxonomy& tax);

}  // namespace atl
