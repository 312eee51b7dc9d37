// Copyright 2026 The ATL Authors
// SPDX-License-Identifier: Apache-2.0

#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <vector>

#include "atl/affordance.hpp"
#include "atl/experiment.hpp"

namespace {

// ride-horse=0 eat-apple=1 hold-horse=2 ; ride=0 eat=1 hold=2 ; horse=0 apple=1
atl::Taxonomy tiny() {
  return atl::Taxonomy({"ride", "eat", "hold"}, {"horse", "apple"}, {{0, 0}, {1, 1}, {2, 0}});
}

// Interaction classifier with a single hidden unit that copies input 0 and
// outputs sigmoid(gain * x0 + bias) for every category. Feature dim is 1.
atl::HoiModel threshold_model(int categories, double gain, double bias) {
  atl::HoiModel m;
  m.feat_dim = 1;
  m.interaction.w1 = atl::Matrix(1, 2);
  m.interaction.w1(0, 0) = 1.0;
  m.interaction.b1 = {0.0};
  m.interaction.w2 = atl::Matrix(categories, 1, gain);
  m.interaction.b2.assign(categories, bias);
  return m;
}

atl::AffordanceBank bank_of(std::vector<std::vector<std::vector<double>>> entries) {
  atl::AffordanceBank b;
  b.cap = 100;
  b.feat_dim = 1;
  b.entries = std::move(entries);
  return b;
}

}  // namespace

TEST_CASE("saturated classifiers give full or empty scores") {
  const auto tax = tiny();
  const auto bank = bank_of({{{0.1}, {0.2}}, {{0.3}}, {}});
  const std::vector<double> obj{0.0};
  const auto on = atl::recognize(obj, bank, threshold_model(3, 0.0, 50.0), tax);
  CHECK(on.score[0] == 1.0);
  CHECK(on.score[1] == 1.0);
  CHECK_FALSE(on.score[2].has_value());
  CHECK(on.hits[0] == on.bank_counts[0]);
  CHECK(on.kept == std::vector<int>{0, 1});

  const auto off = atl::recognize(obj, bank, threshold_model(3, 0.0, -50.0), tax);
  CHECK(off.score[0] == 0.0);
  CHECK(off.score[1] == 0.0);
  CHECK(off.kept.empty());
}

TEST_CASE("three of four ride entries firing gives 0.75") {
  const auto tax = tiny();
  // The classifier fires when the banked feature exceeds 0.5.
  const auto bank = bank_of({{{1.0}, {2.0}, {-1.0}, {3.0}}, {}, {}});
  const auto s = atl::recognize(std::vector<double>{0.0}, bank,
                                threshold_model(3, 40.0, -20.0), tax);
  CHECK(s.hits[0] == 3);
  CHECK(s.bank_counts[0] == 4);
  CHECK(*s.score[0] == 0.75);
  CHECK(s.kept == std::vector<int>{0});
}

TEST_CASE("recognize rejects bad inputs") {
  const auto tax = tiny();
  const auto model = threshold_model(3, 1.0, 0.0);
  CHECK_THROWS_AS(atl::recognize(std::vector<double>{0.0}, bank_of({{}, {}, {}}), model, tax),
                  std::invalid_argument);
  const auto bank = bank_of({{{1.0}}, {}, {}});
  CHECK_THROWS_AS(atl::recognize(std::vector<double>{0.0, 1.0}, bank, model, tax),
                  std::invalid_argument);
  CHECK_THROWS_AS(atl::recognize(std::vector<double>{0.0}, bank, model, tax, 1.5),
                  std::invalid_argument);
}

TEST_CASE("verb scores take the max over a verb's categories") {
  const auto tax = tiny();
  CHECK(atl::verb_scores(std::vector<double>{0.2, 0.9, 0.6}, tax) ==
        std::vector<double>{0.2, 0.9, 0.6});
  const atl::Taxonomy two({"ride"}, {"horse", "camel"}, {{0, 0}, {0, 1}});
  CHECK(atl::verb_scores(std::vector<double>{0.3, 0.7}, two) == std::vector<double>{0.7});
}

TEST_CASE("build_bank respects the cap and is deterministic") {
  const auto w = atl::gen_world({});
  const auto ds = atl::gen_dataset(w.spec, w.taxonomy, atl::no_split(w.taxonomy),
                                   {3000, 10, 10}, 4);
  const auto bank = atl::build_bank(ds.train, ds.taxonomy, 100, 9);
  std::vector<std::size_t> holders(w.taxonomy.num_verbs(), 0);
  for (const auto& inst : ds.train) {
    const auto verbs = atl::decouple_verb(inst.hoi_label, ds.taxonomy);
    for (int v = 0; v < w.taxonomy.num_verbs(); ++v) holders[v] += verbs[v];
  }
  for (int v = 0; v < w.taxonomy.num_verbs(); ++v) {
    CHECK(bank.count(v) == std::min<std::size_t>(holders[v], 100));
  }
  const auto again = atl::build_bank(ds.train, ds.taxonomy, 100, 9);
  CHECK(again.entries == bank.entries);
  CHECK(atl::build_bank({}, ds.taxonomy, 100, 9).empty());
}

TEST_CASE("no-interaction verbs stay out of the bank") {
  const atl::Taxonomy tax({"ride", "none"}, {"horse"}, {{0, 0}, {1, 0}}, {}, {false, true});
  atl::HoiInstance inst;
  inst.hoi_label = {1, 1};
  inst.verb_feat = {0.5};
  const std::vector<atl::HoiInstance> set{inst, inst};
  const auto bank = atl::build_bank(set, tax, 10, 1);
  CHECK(bank.count(0) == 2);
  CHECK(bank.count(1) == 0);
}

TEST_CASE("recognize properties on a trained model") {
  const auto w = atl::gen_world({});
  const auto ds = atl::gen_dataset(w.spec, w.taxonomy, atl::no_split(w.taxonomy),
                                   {1000, 10, 200}, 2);
  atl::TrainConfig cfg;
  cfg.hidden_width = 32;
  cfg.spatial_hidden_width = 8;
  cfg.iterations = 200;
  cfg.lr = 2.0;
  const auto model = atl::train(ds.train, ds.external, ds.taxonomy, cfg).model;
  const auto bank = atl::build_bank(ds.train, ds.taxonomy, 20, 3);
  auto shuffled = bank;
  atl::Rng rng(5);
  for (auto& list : shuffled.entries) std::shuffle(list.begin(), list.end(), rng);

  for (const auto& q : ds.external) {
    const auto s = atl::recognize(q.object_feat, bank, model, ds.taxonomy);
    for (int v = 0; v < ds.taxonomy.num_verbs(); ++v) {
      CHECK(s.bank_counts[v] <= bank.cap);
      CHECK(s.hits[v] <= s.bank_counts[v]);
      if (s.score[v]) {
        CHECK(*s.score[v] >= 0.0);
        CHECK(*s.score[v] <= 1.0);
      } else {
        CHECK(s.bank_counts[v] == 0);
      }
    }
    for (const int v : s.kept) CHECK(s.bank_counts[v] > 0);
    const auto p = atl::recognize(q.object_feat, shuffled, model, ds.taxonomy);
    CHECK(p.hits == s.hits);
    CHECK(p.kept == s.kept);
    const auto strict = atl::recognize(q.object_feat, bank, model, ds.taxonomy, 0.8);
    for (int v = 0; v < ds.taxonomy.num_verbs(); ++v) CHECK(strict.hits[v] <= s.hits[v]);
  }
}
