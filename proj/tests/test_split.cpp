// Copyright 2026 The ATL Authors
// SPDX-License-Identifier: Apache-2.0

#include <doctest.h>

#include <set>
#include <vector>

#include "atl/error.hpp"
#include "atl/split.hpp"
#include "atl/synthgen.hpp"

namespace {

atl::Taxonomy counted() {
  return atl::Taxonomy({"a", "b"}, {"x", "y"}, {{0, 0}, {1, 0}, {0, 1}, {1, 1}},
                       {9, 1, 100, 5});
}

void check_partition(const atl::SplitSpec& s, int c) {
  std::set<int> seen(s.seen_hoi_ids.begin(), s.seen_hoi_ids.end());
  std::set<int> unseen(s.unseen_hoi_ids.begin(), s.unseen_hoi_ids.end());
  for (int i = 0; i < c; ++i) CHECK(seen.count(i) + unseen.count(i) == 1);
  CHECK(static_cast<int>(seen.size() + unseen.size()) == c);
}

}  // namespace

TEST_CASE("rare-first and non-rare-first pick by count") {
  const auto tax = counted();
  const auto rare = atl::make_composition_split(tax, atl::SplitMode::kRareFirst, 2);
  CHECK(rare.unseen_hoi_ids == std::vector<int>{1, 3});  // counts 1 and 5
  const auto head = atl::make_composition_split(tax, atl::SplitMode::kNonRareFirst, 2);
  CHECK(head.unseen_hoi_ids == std::vector<int>{0, 2});  // counts 100 and 9
  check_partition(rare, 4);
  check_partition(head, 4);
  CHECK_THROWS_AS(atl::make_composition_split(tax, atl::SplitMode::kRareFirst, 4),
                  std::invalid_argument);
}

TEST_CASE("ties go to the lower category id") {
  const atl::Taxonomy tax({"a"}, {"x", "y", "z"}, {{0, 0}, {0, 1}, {0, 2}}, {3, 3, 3});
  CHECK(atl::make_composition_split(tax, atl::SplitMode::kRareFirst, 1).unseen_hoi_ids ==
        std::vector<int>{0});
  CHECK(atl::make_composition_split(tax, atl::SplitMode::kNonRareFirst, 1).unseen_hoi_ids ==
        std::vector<int>{0});
}

TEST_CASE("novel-object split holds out every category of the object") {
  // ride-horse=0 eat-apple=1
  const atl::Taxonomy tax({"ride", "eat"}, {"horse", "apple"}, {{0, 0}, {1, 1}});
  const auto s = atl::make_novel_object_split(tax, {1});
  CHECK(s.unseen_hoi_ids == std::vector<int>{1});
  CHECK(s.seen_hoi_ids == std::vector<int>{0});
  CHECK(s.is_unseen(1));
  CHECK_NOTHROW(atl::validate_split(s, tax));
}

TEST_CASE("validate_split rejects broken splits") {
  const auto tax = counted();
  auto s = atl::make_composition_split(tax, atl::SplitMode::kRareFirst, 1);
  auto overlap = s;
  overlap.seen_hoi_ids.insert(overlap.seen_hoi_ids.begin(), s.unseen_hoi_ids[0]);
  CHECK_THROWS_AS(atl::validate_split(overlap, tax), atl::DataError);
  auto missing = s;
  missing.seen_hoi_ids.pop_back();
  CHECK_THROWS_AS(atl::validate_split(missing, tax), atl::DataError);
  auto open = atl::make_novel_object_split(tax, {0});
  open.unseen_hoi_ids.pop_back();
  open.seen_hoi_ids.push_back(1);
  std::sort(open.seen_hoi_ids.begin(), open.seen_hoi_ids.end());
  CHECK_THROWS_AS(atl::validate_split(open, tax), atl::DataError);
}

TEST_CASE("split modes parse and print") {
  for (const auto m : {atl::SplitMode::kNone, atl::SplitMode::kRareFirst,
                       atl::SplitMode::kNonRareFirst, atl::SplitMode::kNovelObject}) {
    CHECK(atl::parse_split_mode(atl::to_string(m)) == m);
  }
  CHECK_THROWS_AS(atl::parse_split_mode("sideways"), atl::ConfigError);
}

TEST_CASE("novel-object choice is deterministic and sized") {
  const auto w = atl::gen_world({});
  atl::Rng a(4), b(4);
  const auto x = atl::choose_novel_objects(w.taxonomy, 0.2, a);
  CHECK(x == atl::choose_novel_objects(w.taxonomy, 0.2, b));
  CHECK(x.size() == 4);
  const atl::Taxonomy one({"v"}, {"o"}, {{0, 0}});
  CHECK_THROWS_AS(atl::choose_novel_objects(one, 0.2, a), atl::DataError);
}

TEST_CASE("zero-shot splits never leak into training data") {
  const auto w = atl::gen_world({});
  atl::Rng rng(10);
  std::vector<atl::SplitSpec> splits{
      atl::make_composition_split(w.taxonomy, atl::SplitMode::kRareFirst,
                                  atl::default_unseen_count(w.taxonomy)),
      atl::make_composition_split(w.taxonomy, atl::SplitMode::kNonRareFirst,
                                  atl::default_unseen_count(w.taxonomy)),
      atl::make_novel_object_split(w.taxonomy,
                                   atl::choose_novel_objects(w.taxonomy, 0.2, rng))};
  for (const auto& split : splits) {
    atl::validate_split(split, w.taxonomy);
    const auto ds = atl::gen_dataset(w.spec, w.taxonomy, split, {1500, 300, 100}, 2);
    int leaks = 0;
    for (const auto& inst : ds.train) {
      for (const int c : split.unseen_hoi_ids) leaks += inst.hoi_label[c];
    }
    CHECK(leaks == 0);
    bool unseen_in_test = false;
    for (const auto& inst : ds.test) {
      for (const int c : split.unseen_hoi_ids) unseen_in_test |= inst.hoi_label[c] != 0;
    }
    CHECK(unseen_in_test);
  }
}
