// Copyright 2026 The ATL Authors
// SPDX-License-Identifier: Apache-2.0

#include "atl/split.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

#include "atl/error.hpp"

namespace atl {

std::string_view to_string(SplitMode mode) {
  switch (mode) {
    case SplitMode::kNone: return "none";
    case SplitMode::kRareFirst: return "rare-first";
    case SplitMode::kNonRareFirst: return "nonrare-first";
    case SplitMode::kNovelObject: return "novel-object";
  }
  return "none";
}

SplitMode parse_split_mode(std::string_view text) {
  if (text == "none") return SplitMode::kNone;
  if (text == "rare-first" || text == "unseen-composition-rare-first") {
    return SplitMode::kRareFirst;
  }
  if (text == "nonrare-first" || text == "non-rare-first" ||
      text == "unseen-composition-nonrare-first") {
    return SplitMode::kNonRareFirst;
  }
  if (text == "novel-object") return SplitMode::kNovelObject;
  throw ConfigError("unknown split mode '" + std::string(text) + "'");
}

bool SplitSpec::is_unseen(int category) const {
  return std::binary_search(unseen_hoi_ids.begin(), unseen_hoi_ids.end(), category);
}

void validate_split(const SplitSpec& split, const Taxonomy& tax) {
  const int c = tax.num_categories();
  std::vector<int> owner(c, 0);
  for (const int id : split.unseen_hoi_ids) {
    if (id < 0 || id >= c) throw DataError("split: unseen category out of range");
    if (owner[id]++) throw DataError("split: category listed twice");
  }
  for (const int id : split.seen_hoi_ids) {
    if (id < 0 || id >= c) throw DataError("split: seen category out of range");
    if (owner[id]++) throw DataError("split: category is both seen and unseen");
  }
  for (int id = 0; id < c; ++id) {
    if (owner[id] != 1) throw DataError("split: category " + std::to_string(id) + " not covered");
  }
  if (!std::is_sorted(split.unseen_hoi_ids.begin(), split.unseen_hoi_ids.end()) ||
      !std::is_sorted(split.seen_hoi_ids.begin(), split.seen_hoi_ids.end())) {
    throw DataError("split: id lists must be sorted");
  }
  if (split.mode == SplitMode::kNone && !split.unseen_hoi_ids.empty()) {
    throw DataError("split: mode none cannot hold unseen categories");
  }
  if (split.mode == SplitMode::kNovelObject) {
    const SplitSpec expect = make_novel_object_split(tax, split.unseen_object_ids);
    if (expect.unseen_hoi_ids != split.unseen_hoi_ids) {
      throw DataError("split: novel-object unseen set must be exactly the categories of the unseen objects");
    }
  } else if (!split.unseen_object_ids.empty()) {
    throw DataError("split: unseen_object_ids only valid in novel-object mode");
  }
}

SplitSpec no_split(const Taxonomy& tax) {
  SplitSpec s;
  s.seen_hoi_ids.resize(tax.num_categories());
  std::iota(s.seen_hoi_ids.begin(), s.seen_hoi_ids.end(), 0);
  return s;
}

SplitSpec make_composition_split(const Taxonomy& tax, SplitMode mode,
                                 int unseen_count) {
  if (mode != SplitMode::kRareFirst && mode != SplitMode::kNonRareFirst) {
    throw std::invalid_argument("make_composition_split: mode must be rare-first or nonrare-first");
  }
  const int c = tax.num_categories();
  if (unseen_count < 0 || unseen_count >= c) {
    throw std::invalid_argument("unseen_count must be in [0, C)");
  }
  std::vector<int> order(c);
  std::iota(order.begin(), order.end(), 0);
  const auto& counts = tax.train_counts();
  std::stable_sort(order.begin(), order.end(), [&](int a, int b) {
    return mode == SplitMode::kRareFirst ? counts[a] < counts[b] : counts[a] > counts[b];
  });
  SplitSpec s;
  s.mode = mode;
  s.unseen_hoi_ids.assign(order.begin(), order.begin() + unseen_count);
  s.seen_hoi_ids.assign(order.begin() + unseen_count, order.end());
  std::sort(s.unseen_hoi_ids.begin(), s.unseen_hoi_ids.end());
  std::sort(s.seen_hoi_ids.begin(), s.seen_hoi_ids.end());
  return s;
}

SplitSpec make_novel_object_split(const Taxonomy& tax, std::vector<int> unseen_objects) {
  std::sort(unseen_objects.begin(), unseen_objects.end());
  unseen_objects.erase(std::unique(unseen_objects.begin(), unseen_objects.end()),
                       unseen_objects.end());
  SplitSpec s;
  s.mode = SplitMode::kNovelObject;
  std::vector<std::uint8_t> hidden(tax.num_objects(), 0);
  for (const int o : unseen_objects) {
    if (o < 0 || o >= tax.num_objects()) {
      throw std::out_of_range("novel object id " + std::to_string(o) + " out of range");
    }
    hidden[o] = 1;
  }
  for (int c = 0; c < tax.num_categories(); ++c) {
    (hidden[tax.pair(c).object] ? s.unseen_hoi_ids : s.seen_hoi_ids).push_back(c);
  }
  s.unseen_object_ids = std::move(unseen_objects);
  return s;
}

std::vector<int> choose_novel_objects(const Taxonomy& tax, double fraction, Rng& rng) {
  if (!(fraction > 0.0) || fraction >= 1.0) {
    throw std::invalid_argument("novel object fraction must be in (0, 1)");
  }
  const int n = tax.num_objects();
  if (n < 2) throw DataError("a novel-object split needs at least two objects");
  const int k = std::clamp(static_cast<int>(std::lround(fraction * n)), 1, n - 1);
  std::vector<int> ids(n);
  std::iota(ids.begin(), ids.end(), 0);
  std::shuffle(ids.begin(), ids.end(), rng);
  ids.resize(k);
  std::sort(ids.begin(), ids.end());
  return ids;
}

int default_unseen_count(const Taxonomy& tax) {
  return std::max(1, static_cast<int>(std::lround(0.2 * tax.num_categories())));
}

}  // namespace atl
