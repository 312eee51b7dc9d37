// Copyright 2026 The ATL Authors
// SPDX-License-Identifier: Apache-2.0

#include <doctest.h>

#include <cmath>
#include <optional>
#include <vector>

#include "atl/evalkit.hpp"
#include "atl/rng.hpp"

namespace {

// Area under the precision/recall step curve: sum over ranks of
// precision(k) * (recall(k) - recall(k - 1)), with both recomputed from
// scratch on every prefix.
double ap_oracle(const std::vector<std::uint8_t>& tp, int n_pos) {
  if (n_pos == 0) return 0.0;
  double area = 0.0;
  double prev_recall = 0.0;
  for (std::size_t k = 1; k <= tp.size(); ++k) {
    int hits = 0;
    for (std::size_t i = 0; i < k; ++i) hits += tp[i];
    const double recall = static_cast<double>(hits) / n_pos;
    area += (static_cast<double>(hits) / static_cast<double>(k)) * (recall - prev_recall);
    prev_recall = recall;
  }
  return area;
}

atl::Detection det(std::int64_t img, int cat, double score, atl::Box h = {0, 0, 1, 1},
                   atl::Box o = {0, 0, 1, 1}) {
  return {img, h, o, cat, score};
}

}  // namespace

TEST_CASE("iou examples") {
  const atl::Box unit{0, 0, 1, 1};
  CHECK(atl::iou(unit, unit) == 1.0);
  CHECK(atl::iou(unit, {2, 2, 3, 3}) == 0.0);
  CHECK(atl::iou(unit, {0.5, 0, 1, 1}) == 0.5);
}

TEST_CASE("average_precision matches the brute-force oracle exhaustively") {
  int cases = 0;
  for (int n = 0; n <= 8; ++n) {
    for (unsigned mask = 0; mask < (1u << n); ++mask) {
      std::vector<std::uint8_t> tp(n);
      int hits = 0;
      for (int i = 0; i < n; ++i) hits += tp[i] = (mask >> i) & 1u;
      for (int n_pos = hits; n_pos <= hits + 2; ++n_pos) {
        CHECK(std::abs(atl::average_precision(tp, n_pos) - ap_oracle(tp, n_pos)) <= 1e-12);
        ++cases;
      }
    }
  }
  CHECK(cases == 3 * 511);
}

TEST_CASE("average_precision anchors") {
  CHECK(atl::average_precision(std::vector<std::uint8_t>{1, 1, 1}, 3) == 1.0);
  CHECK(atl::average_precision(std::vector<std::uint8_t>{0, 1}, 1) == 0.5);
  CHECK(atl::average_precision(std::vector<std::uint8_t>{0, 0}, 2) == 0.0);
  CHECK(atl::average_precision(std::vector<std::uint8_t>{}, 0) == 0.0);
  CHECK_THROWS_AS(atl::average_precision(std::vector<std::uint8_t>{1, 1}, 1),
                  std::invalid_argument);
}

TEST_CASE("match_detections examples") {
  const std::vector<atl::GroundTruth> gt{{0, {0, 0, 1, 1}, {0, 0, 1, 1}, 2}};
  CHECK(atl::match_detections(std::vector{det(0, 2, 0.9)}, gt) ==
        std::vector<std::uint8_t>{1});
  CHECK(atl::match_detections(std::vector{det(0, 2, 0.9), det(0, 2, 0.8)}, gt) ==
        std::vector<std::uint8_t>{1, 0});
  CHECK(atl::match_detections(std::vector{det(0, 1, 0.9)}, gt) ==
        std::vector<std::uint8_t>{0});
  CHECK(atl::match_detections(std::vector{det(1, 2, 0.9)}, gt) ==
        std::vector<std::uint8_t>{0});
  // Object box overlap below threshold.
  CHECK(atl::match_detections(std::vector{det(0, 2, 0.9, {0, 0, 1, 1}, {0.6, 0, 1, 1})}, gt) ==
        std::vector<std::uint8_t>{0});
}

TEST_CASE("matching never produces more true positives than ground truth") {
  atl::Rng rng(6);
  for (int t = 0; t < 200; ++t) {
    std::vector<atl::GroundTruth> gt;
    const int ng = static_cast<int>(atl::uniform_index(rng, 5));
    for (int i = 0; i < ng; ++i) {
      gt.push_back({static_cast<std::int64_t>(atl::uniform_index(rng, 2)), {0, 0, 1, 1},
                    {0, 0, 1, 1}, static_cast<int>(atl::uniform_index(rng, 2))});
    }
    std::vector<atl::Detection> preds;
    const int np = static_cast<int>(atl::uniform_index(rng, 10));
    for (int i = 0; i < np; ++i) {
      preds.push_back(det(static_cast<std::int64_t>(atl::uniform_index(rng, 2)),
                          static_cast<int>(atl::uniform_index(rng, 2)),
                          atl::uniform(rng, 0, 1)));
    }
    const auto tp = atl::match_detections(atl::rank_detections(preds), gt);
    int hits = 0;
    for (auto b : tp) hits += b;
    CHECK(hits <= ng);
  }
}

TEST_CASE("ranking is stable for ties") {
  const auto ranked = atl::rank_detections({det(0, 0, 0.5), det(1, 0, 0.9), det(2, 0, 0.5)});
  CHECK(ranked[0].image_id == 1);
  CHECK(ranked[1].image_id == 0);
  CHECK(ranked[2].image_id == 2);
}

TEST_CASE("map_report groups") {
  // 4 categories; counts make 0 and 1 rare.
  const atl::Taxonomy tax({"a", "b"}, {"x", "y"}, {{0, 0}, {1, 0}, {0, 1}, {1, 1}},
                          {2, 5, 50, 80});
  std::vector<atl::GroundTruth> gt;
  std::vector<atl::Detection> preds;
  for (int c = 0; c < 3; ++c) {  // category 3 has no ground truth
    gt.push_back({c, {0, 0, 1, 1}, {0, 0, 1, 1}, c});
    preds.push_back(det(c, c, 0.9));
  }
  const auto split = atl::make_novel_object_split(tax, {1});
  const auto perfect = atl::map_report(preds, gt, tax, split);
  for (const auto& g : perfect.groups) {
    if (g.categories > 0) CHECK(g.mean_ap == 1.0);
  }
  CHECK_FALSE(perfect.category_ap[3].has_value());
  CHECK(perfect.group("Full").categories == 3);

  // Category 1 misses: a false positive outranks its true positive.
  preds.push_back(det(7, 1, 0.95));
  const auto r = atl::map_report(preds, gt, tax, split);
  REQUIRE(r.category_ap[1].has_value());
  CHECK(*r.category_ap[1] == 0.5);
  // Full pools category APs rather than averaging group means.
  const double pooled = (1.0 + 0.5 + 1.0) / 3.0;
  CHECK(r.group("Full").mean_ap == doctest::Approx(pooled).epsilon(1e-15));
  CHECK(r.group("Rare").mean_ap == 0.75);
  CHECK(r.group("NonRare").mean_ap == 1.0);
  CHECK(r.group("Unseen").mean_ap == 1.0);  // category 2 only
  CHECK(r.group("Seen").mean_ap == 0.75);
  CHECK_FALSE(atl::map_report(preds, gt, tax, atl::no_split(tax)).has_group("Unseen"));
}

TEST_CASE("affordance_prf1 examples") {
  using Sets = std::vector<std::vector<int>>;
  const auto same = atl::affordance_prf1(Sets{{0, 1}, {2}}, Sets{{0, 1}, {2}});
  CHECK(same.micro.precision == 1.0);
  CHECK(same.micro.recall == 1.0);
  CHECK(same.micro.f1 == 1.0);

  const auto none = atl::affordance_prf1(Sets{{}}, Sets{{1}});
  CHECK(none.micro.precision == 0.0);
  CHECK(none.micro.precision_undefined);
  CHECK(none.micro.recall == 0.0);
  CHECK(none.micro.f1 == 0.0);

  const auto half = atl::affordance_prf1(Sets{{0, 1}}, Sets{{0}});
  CHECK(half.micro.precision == 0.5);
  CHECK(half.micro.recall == 1.0);
  CHECK(half.micro.f1 == doctest::Approx(2.0 / 3.0).epsilon(1e-15));
}

TEST_CASE("affordance_map conventions") {
  using Scores = std::vector<std::vector<std::optional<double>>>;
  using Sets = std::vector<std::vector<int>>;
  const Scores separated{{0.9, 0.1}, {0.2, 0.8}};
  CHECK(atl::affordance_map(separated, Sets{{0}, {1}}, 2) == 1.0);
  // Verb 1 has no positive object and is excluded.
  CHECK(atl::affordance_map(Scores{{0.9, 0.4}, {0.1, 0.7}}, Sets{{0}, {0}}, 2) == 1.0);
  // Nothing scorable.
  CHECK_FALSE(atl::affordance_map(Scores{{std::nullopt}}, Sets{{0}}, 1).has_value());
}

TEST_CASE("affordance_map of random scores is close to the positive rate") {
  atl::Rng rng(12);
  double total = 0.0;
  // Random-ranking AP exceeds the positive rate by O(log n / n); 200 objects
  // keep that bias well inside the tolerance.
  const int trials = 10000;
  for (int t = 0; t < trials; ++t) {
    std::vector<std::vector<std::optional<double>>> scores(200);
    std::vector<std::vector<int>> truth(200);
    for (int i = 0; i < 200; ++i) {
      scores[i] = {atl::uniform(rng, 0, 1)};
      if (i % 2 == 0) truth[i] = {0};
    }
    total += *atl::affordance_map(scores, truth, 1);
  }
  CHECK(std::abs(total / trials - 0.5) <= 0.05);
}
