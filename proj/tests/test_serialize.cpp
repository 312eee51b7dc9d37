// Copyright 2026 The ATL Authors
// SPDX-License-Identifier: Apache-2.0

#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <vector>

#include "atl/error.hpp"
#include "atl/serialize.hpp"

namespace fs = std::filesystem;

namespace {

fs::path scratch_dir(const char* name) {
  const fs::path dir = fs::temp_directory_path() / "atl_serialize_tests" / name;
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir;
}

void check_close(const std::vector<double>& a, const std::vector<double>& b) {
  REQUIRE(a.size() == b.size());
  for (std::size_t i = 0; i < a.size(); ++i) CHECK(std::abs(a[i] - b[i]) <= 1e-9);
}

}  // namespace

TEST_CASE("doubles print in shortest round-trip form") {
  for (const double x : {0.1, 1.0 / 3.0, -2.5e-300, 6.02214076e23, 0.0}) {
    CHECK(std::stod(atl::format_double(x)) == x);
  }
  CHECK(atl::format_double(0.5) == "0.5");
}

TEST_CASE("taxonomy, world and split round-trip") {
  atl::WorldParams p;
  p.num_no_interaction = 1;
  const auto w = atl::gen_world(p);
  const auto tax = atl::taxonomy_from_json(atl::to_json(w.taxonomy));
  CHECK(tax.pairs() == w.taxonomy.pairs());
  CHECK(tax.verb_names() == w.taxonomy.verb_names());
  CHECK(tax.train_counts() == w.taxonomy.train_counts());
  CHECK(tax.no_interaction() == w.taxonomy.no_interaction());

  const auto spec = atl::world_from_json(atl::to_json(w.spec));
  CHECK(spec.verb_prototypes == w.spec.verb_prototypes);
  CHECK(spec.object_domain_shift == w.spec.object_domain_shift);
  CHECK(spec.verb_offsets == w.spec.verb_offsets);

  const auto split = atl::make_novel_object_split(w.taxonomy, {1, 2});
  const auto back = atl::split_from_json(atl::to_json(split));
  CHECK(back.unseen_hoi_ids == split.unseen_hoi_ids);
  CHECK(back.unseen_object_ids == split.unseen_object_ids);
  CHECK(back.mode == split.mode);
}

TEST_CASE("datasets round-trip through JSON lines to 1e-9") {
  const auto w = atl::gen_world({});
  const auto ds =
      atl::gen_dataset(w.spec, w.taxonomy, atl::no_split(w.taxonomy), {200, 20, 50}, 3);
  const auto dir = scratch_dir("dataset");
  atl::write_hoi_set(dir / "train.jsonl", ds.train);
  atl::write_object_set(dir / "external.jsonl", ds.external);
  const auto train = atl::read_hoi_set(dir / "train.jsonl", w.taxonomy);
  const auto ext = atl::read_object_set(dir / "external.jsonl", w.taxonomy);
  REQUIRE(train.size() == ds.train.size());
  for (std::size_t i = 0; i < train.size(); ++i) {
    check_close(train[i].verb_feat, ds.train[i].verb_feat);
    check_close(train[i].human_feat, ds.train[i].human_feat);
    check_close(train[i].object_feat, ds.train[i].object_feat);
    CHECK(train[i].hoi_label == ds.train[i].hoi_label);
    CHECK(train[i].human_box == ds.train[i].human_box);
  }
  REQUIRE(ext.size() == ds.external.size());
  for (std::size_t i = 0; i < ext.size(); ++i) {
    check_close(ext[i].object_feat, ds.external[i].object_feat);
    CHECK(ext[i].object_label == ds.external[i].object_label);
  }
}

TEST_CASE("checkpoints and banks round-trip exactly") {
  const auto w = atl::gen_world({});
  atl::TrainConfig cfg;
  cfg.hidden_width = 7;
  cfg.spatial_hidden_width = 5;
  cfg.lambda_aux = 0.3;
  cfg.seed = 99;
  const auto model = atl::init_model(w.taxonomy, w.spec.feat_dim, cfg);
  atl::TrainConfig loaded_cfg;
  const auto back = atl::checkpoint_from_json(atl::to_json(model, cfg), &loaded_cfg);
  CHECK(back == model);
  CHECK(atl::to_json(loaded_cfg) == atl::to_json(cfg));

  const auto ds =
      atl::gen_dataset(w.spec, w.taxonomy, atl::no_split(w.taxonomy), {300, 1, 1}, 3);
  const auto bank = atl::build_bank(ds.train, ds.taxonomy, 10, 4);
  const auto bank2 = atl::bank_from_json(atl::to_json(bank));
  CHECK(bank2.entries == bank.entries);
  CHECK(bank2.cap == bank.cap);
  CHECK(bank2.source_seed == bank.source_seed);
}

TEST_CASE("loaders name the offending field") {
  const auto w = atl::gen_world({});
  atl::TrainConfig cfg;
  cfg.hidden_width = 3;
  cfg.spatial_hidden_width = 3;
  auto j = atl::to_json(atl::init_model(w.taxonomy, w.spec.feat_dim, cfg), cfg);
  j["interaction"]["w1"] = atl::Json::array({1.0, 2.0});
  CHECK_THROWS_WITH_AS(atl::checkpoint_from_json(j), doctest::Contains("w1"), atl::DataError);

  auto t = atl::to_json(w.taxonomy);
  t["format"] = "atl-bank";
  CHECK_THROWS_AS(atl::taxonomy_from_json(t), atl::DataError);
  t = atl::to_json(w.taxonomy);
  t.erase("pairs");
  CHECK_THROWS_WITH_AS(atl::taxonomy_from_json(t), doctest::Contains("pairs"), atl::DataError);
}

TEST_CASE("train config rejects unknown keys and keeps defaults") {
  const auto c = atl::train_config_from_json(atl::Json::parse(R"({"lr": 0.25})"));
  CHECK(c.lr == 0.25);
  CHECK(c.lambda1 == 2.0);
  CHECK_THROWS_WITH_AS(atl::train_config_from_json(atl::Json::parse(R"({"lr2": 1})")),
                       doctest::Contains("lr2"), atl::ConfigError);
  CHECK_THROWS_AS(atl::train_config_from_json(atl::Json::parse(R"({"lr": "fast"})")),
                  atl::ConfigError);
  CHECK_THROWS_AS(atl::train_config_from_json(atl::Json::parse(R"({"hoi_batch": 0})")),
                  atl::ConfigError);
}

TEST_CASE("loss trace CSV header and rows") {
  const std::vector<atl::LossRecord> trace{{0, 1.0, 0.5, 0.25, 2.125}};
  CHECK(atl::loss_trace_csv(trace) == "step,L_sp,L_hoi,L_ATL,L_total\n0,1,0.5,0.25,2.125\n");
}

TEST_CASE("content hash is stable and sensitive") {
  const auto a = atl::Json::parse(R"({"x": 1, "y": [1, 2]})");
  auto b = a;
  CHECK(atl::content_hash(a) == atl::content_hash(b));
  b["y"][1] = 3;
  CHECK(atl::content_hash(a) != atl::content_hash(b));
  CHECK(atl::content_hash(a).size() == 16);
}

TEST_CASE("missing files raise data errors") {
  CHECK_THROWS_AS(atl::read_json("/nonexistent/atl/file.json"), atl::DataError);
}
