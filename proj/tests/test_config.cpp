// Copyright 2026 The ATL Authors
// SPDX-License-Identifier: Apache-2.0

#include <doctest.h>

#include <string>

#include "atl/config.hpp"
#include "atl/error.hpp"

namespace {

atl::Json parse(const std::string& text) { return atl::Json::parse(text); }

std::string config_error(const std::string& text) {
  try {
    atl::run_config_from_json(parse(text));
  } catch (const atl::ConfigError& e) {
    return e.what();
  }
  return "";
}

}  // namespace

TEST_CASE("a bare schema_version gives the defaults") {
  const auto c = atl::run_config_from_json(parse(R"({"schema_version": 1})"));
  const atl::RunConfig d;
  CHECK(c.seed == d.seed);
  CHECK(c.bank_cap == 100);
  CHECK(c.train.iterations == atl::desk_train_config().iterations);
  CHECK(c.split.mode == atl::SplitMode::kNovelObject);
}

TEST_CASE("schema_version is required and checked") {
  CHECK(config_error(R"({})").find("schema_version") != std::string::npos);
  CHECK(config_error(R"({"schema_version": 2})").find("not supported") != std::string::npos);
  CHECK(config_error(R"({"schema_version": "1"})").find("schema_version") != std::string::npos);
}

TEST_CASE("unknown keys are rejected at every level") {
  CHECK(config_error(R"({"schema_version": 1, "sede": 4})") == "config: unknown key 'sede'");
  CHECK(config_error(R"({"schema_version": 1, "world": {"verbs": 3}})") ==
        "world: unknown key 'verbs'");
  CHECK(config_error(R"({"schema_version": 1, "bank": {"m": 3}})") == "bank: unknown key 'm'");
  CHECK_FALSE(config_error(R"({"schema_version": 1, "train": {"lr_": 1}})").empty());
  CHECK_FALSE(config_error(R"({"schema_version": 1, "trends": {"seed": [1]}})").empty());
}

TEST_CASE("values are type- and range-checked") {
  CHECK_FALSE(config_error(R"({"schema_version": 1, "bank": {"M": 0}})").empty());
  CHECK_FALSE(config_error(R"({"schema_version": 1, "bank": {"M": "many"}})").empty());
  CHECK_FALSE(config_error(R"({"schema_version": 1, "world": {"num_pairs": 1000}})").empty());
  CHECK_FALSE(config_error(R"({"schema_version": 1, "split": {"mode": "sideways"}})").empty());
  CHECK_FALSE(config_error(R"({"schema_version": 1, "trends": {"seeds": []}})").empty());
  CHECK_FALSE(config_error(R"({"schema_version": 1, "world": 3})").empty());
}

TEST_CASE("the master seed drives training") {
  const auto c = atl::run_config_from_json(
      parse(R"({"schema_version": 1, "seed": 9, "train": {"seed": 2}})"));
  CHECK(c.train.seed == 9);
}

TEST_CASE("to_json round-trips through the parser") {
  atl::RunConfig c;
  c.seed = 17;
  c.world.num_objects = 7;
  c.world.num_pairs = 20;
  c.sizes.n_test = 33;
  c.split.mode = atl::SplitMode::kRareFirst;
  c.split.unseen_count = 4;
  c.train.lambda2 = 0.25;
  c.train.seed = 17;
  c.bank_cap = 20;
  c.affordance.queries_per_object = 3;
  c.trends.seeds = {4, 8};
  c.trends.bank_sweep = {5, 50};
  const atl::Json j = atl::to_json(c);
  const auto back = atl::run_config_from_json(j);
  CHECK(atl::to_json(back) == j);
  CHECK(atl::content_hash(atl::to_json(back)) == atl::content_hash(j));
}
