// Copyright 2026 The ATL Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <string>
#include <string_view>
#include <vector>

#include "atl/rng.hpp"
#include "atl/taxonomy.hpp"

namespace atl {

enum class SplitMode {
  kNone,
  kRareFirst,     // unseen composition, tail categories held out first
  kNonRareFirst,  // unseen composition, head categories held out first
  kNovelObject,   // every category of the chosen objects held out
};

std::string_view to_string(SplitMode mode);
SplitMode parse_split_mode(std::string_view text);

// Zero-shot partition of the HOI categories. Id lists are sorted ascending.
struct SplitSpec {
  SplitMode mode = SplitMode::kNone;
  std::vector<int> unseen_hoi_ids;
  std::vector<int> seen_hoi_ids;
  std::vector<int> unseen_object_ids;  // novel-object mode only

  bool is_unseen(int category) const;
};

// Checks disjointness, coverage and the novel-object closure rule.
void validate_split(const SplitSpec& split, const Taxonomy& tax);

SplitSpec no_split(const Taxonomy& tax);

// Rare-first takes the unseen_count categories with the smallest
// train_counts, non-rare-first the largest; ties go to the lower id.
// Rejects unseen_count >= C.
SplitSpec make_composition_split(const Taxonomy& tax, SplitMode mode,
                                 int unseen_count);

// Marks every category whose object is in unseen_objects as unseen.
SplitSpec make_novel_object_split(const Taxonomy& tax,
                                  std::vector<int> unseen_objects);

// Draws round(fraction * N_o) distinct objects (at least one).
std::vector<int> choose_novel_objects(const Taxonomy& tax, double fraction,
                                      Rng& rng);

// Desk-scale default for composition splits: 20% of categories.
int default_unseen_count(const Taxonomy& tax);

}  // namespace atl
