// Copyright 2026 The ATL Authors
// SPDX-License-Identifier: Apache-2.0

#include "atl/config.hpp"

#include <cmath>
#include <initializer_list>
#include <string>

#include "atl/error.hpp"

namespace atl {
namespace {

// Reads one section, rejecting keys outside `known`.
class Section {
 public:
  Section(const Json& j, std::string name, std::initializer_list<const char*> known)
      : j_(j), name_(std::move(name)) {
    if (!j.is_object()) throw ConfigError(name_ + ": expected an object");
    for (const auto& [key, value] : j.items()) {
      bool ok = false;
      for (const char* k : known) ok |= key == k;
      if (!ok) throw ConfigError(name_ + ": unknown key '" + key + "'");
    }
  }

  template <typename T>
  void read(const char* key, T& slot) const {
    if (!j_.contains(key)) return;
    try {
      slot = j_.at(key).get<T>();
    } catch (const nlohmann::json::exception& e) {
      throw ConfigError(name_ + "." + key + ": " + e.what());
    }
  }

 private:
  const Json& j_;
  std::string name_;
};

void require(bool ok, const std::string& field, const std::string& rule) {
  if (!ok) throw ConfigError(field + " " + rule);
}

}  // namespace

void validate(const RunConfig& c) {
  const WorldParams& w = c.world;
  require(w.num_verbs >= 1 && w.num_objects >= 1, "world.num_verbs/num_objects", "must be >= 1");
  require(w.num_pairs >= 1 && static_cast<std::int64_t>(w.num_pairs) <=
                                  static_cast<std::int64_t>(w.num_verbs) * w.num_objects,
          "world.num_pairs", "must be in [1, num_verbs * num_objects]");
  require(w.feat_dim >= 2, "world.feat_dim", "must be >= 2");
  require(w.noise_sigma >= 0.0, "world.noise_sigma", "must be >= 0");
  require(w.tail_exponent >= 0.0, "world.tail_exponent", "must be >= 0");
  require(w.domain_shift >= 0.0, "world.domain_shift", "must be >= 0");
  require(w.co_label_prob >= 0.0 && w.co_label_prob <= 1.0, "world.co_label_prob",
          "must be in [0, 1]");
  require(w.nominal_train >= 1, "world.nominal_train", "must be >= 1");
  require(w.num_no_interaction >= 0 && w.num_no_interaction < w.num_verbs,
          "world.num_no_interaction", "must be in [0, num_verbs)");
  require(c.sizes.n_train >= 0 && c.sizes.n_test >= 0 && c.sizes.n_external >= 0, "sizes",
          "must be >= 0");
  require(c.split.unseen_count >= 0, "split.unseen_count", "must be >= 0");
  require(c.split.novel_fraction > 0.0 && c.split.novel_fraction < 1.0, "split.novel_fraction",
          "must be in (0, 1)");
  validate(c.train);
  require(c.bank_cap >= 1, "bank.M", "must be >= 1");
  const auto in01 = [](double x) { return x >= 0.0 && x <= 1.0; };
  require(in01(c.affordance.hoi_threshold), "affordance.hoi_threshold", "must be in [0, 1]");
  require(in01(c.affordance.keep_threshold), "affordance.keep_threshold", "must be in [0, 1]");
  require(c.affordance.queries_per_object >= 1, "affordance.queries_per_object",
          "must be >= 1");
  require(c.gradcheck.configs >= 1, "gradcheck.configs", "must be >= 1");
  require(c.gradcheck.max_dim >= 1, "gradcheck.max_dim", "must be >= 1");
  require(c.gradcheck.step > 0.0 && std::isfinite(c.gradcheck.step), "gradcheck.step",
          "must be positive");
  require(!c.trends.seeds.empty(), "trends.seeds", "must not be empty");
  require(c.trends.novel_fraction > 0.0 && c.trends.novel_fraction < 1.0,
          "trends.novel_fraction", "must be in (0, 1)");
  for (const int m : c.trends.bank_sweep) require(m >= 1, "trends.bank_sweep", "entries >= 1");
}

RunConfig run_config_from_json(const Json& j) {
  const Section top(j, "config",
                    {"schema_version", "seed", "world", "sizes", "split", "train", "bank",
                     "affordance", "gradcheck", "trends"});
  if (!j.contains("schema_version")) throw ConfigError("config: missing 'schema_version'");
  int version = 0;
  top.read("schema_version", version);
  if (version != kSchemaVersion) {
    throw ConfigError("config: schema_version " + std::to_string(version) +
                      " is not supported (expected " + std::to_string(kSchemaVersion) + ")");
  }
  RunConfig c;
  top.read("seed", c.seed);

  if (j.contains("world")) {
    const Json& w = j.at("world");
    const Section s(w, "world",
                    {"num_verbs", "num_objects", "num_pairs", "feat_dim", "noise_sigma",
                     "tail_exponent", "nominal_train", "domain_shift", "co_label_prob",
                     "num_no_interaction"});
    s.read("num_verbs", c.world.num_verbs);
    s.read("num_objects", c.world.num_objects);
    s.read("num_pairs", c.world.num_pairs);
    s.read("feat_dim", c.world.feat_dim);
    s.read("noise_sigma", c.world.noise_sigma);
    s.read("tail_exponent", c.world.tail_exponent);
    s.read("nominal_train", c.world.nominal_train);
    s.read("domain_shift", c.world.domain_shift);
    s.read("co_label_prob", c.world.co_label_prob);
    s.read("num_no_interaction", c.world.num_no_interaction);
  }
  if (j.contains("sizes")) {
    const Section s(j.at("sizes"), "sizes", {"n_train", "n_test", "n_external"});
    s.read("n_train", c.sizes.n_train);
    s.read("n_test", c.sizes.n_test);
    s.read("n_external", c.sizes.n_external);
  }
  if (j.contains("split")) {
    const Section s(j.at("split"), "split",
                    {"mode", "unseen_count", "novel_fraction", "unseen_objects"});
    std::string mode(to_string(c.split.mode));
    s.read("mode", mode);
    c.split.mode = parse_split_mode(mode);
    s.read("unseen_count", c.split.unseen_count);
    s.read("novel_fraction", c.split.novel_fraction);
    s.read("unseen_objects", c.split.unseen_objects);
  }
  if (j.contains("train")) c.train = train_config_from_json(j.at("train"), c.train);
  if (j.contains("bank")) {
    const Section s(j.at("bank"), "bank", {"M"});
    s.read("M", c.bank_cap);
  }
  if (j.contains("affordance")) {
    const Section s(j.at("affordance"), "affordance",
                    {"hoi_threshold", "keep_threshold", "queries_per_object"});
    s.read("hoi_threshold", c.affordance.hoi_threshold);
    s.read("keep_threshold", c.affordance.keep_threshold);
    s.read("queries_per_object", c.affordance.queries_per_object);
  }
  if (j.contains("gradcheck")) {
    const Section s(j.at("gradcheck"), "gradcheck", {"configs", "max_dim", "step"});
    s.read("configs", c.gradcheck.configs);
    s.read("max_dim", c.gradcheck.max_dim);
    s.read("step", c.gradcheck.step);
  }
  if (j.contains("trends")) {
    const Section s(j.at("trends"), "trends", {"seeds", "novel_fraction", "bank_sweep"});
    s.read("seeds", c.trends.seeds);
    s.read("novel_fraction", c.trends.novel_fraction);
    s.read("bank_sweep", c.trends.bank_sweep);
  }
  // One master seed drives every stream, including training.
  c.train.seed = c.seed;
  validate(c);
  return c;
}

Json to_json(const RunConfig& c) {
  Json j;
  j["schema_version"] = kSchemaVersion;
  j["seed"] = c.seed;
  j["world"] = {{"num_verbs", c.world.num_verbs},
                {"num_objects", c.world.num_objects},
                {"num_pairs", c.world.num_pairs},
                {"feat_dim", c.world.feat_dim},
                {"noise_sigma", c.world.noise_sigma},
                {"tail_exponent", c.world.tail_exponent},
                {"nominal_train", c.world.nominal_train},
                {"domain_shift", c.world.domain_shift},
                {"co_label_prob", c.world.co_label_prob},
                {"num_no_interaction", c.world.num_no_interaction}};
  j["sizes"] = {{"n_train", c.sizes.n_train},
                {"n_test", c.sizes.n_test},
                {"n_external", c.sizes.n_external}};
  j["split"] = {{"mode", std::string(to_string(c.split.mode))},
                {"unseen_count", c.split.unseen_count},
                {"novel_fraction", c.split.novel_fraction},
                {"unseen_objects", c.split.unseen_objects}};
  j["train"] = to_json(c.train);
  j["bank"] = {{"M", c.bank_cap}};
  j["affordance"] = {{"hoi_threshold", c.affordance.hoi_threshold},
                     {"keep_threshold", c.affordance.keep_threshold},
                     {"queries_per_object", c.affordance.queries_per_object}};
  j["gradcheck"] = {{"configs", c.gradcheck.configs},
                    {"max_dim", c.gradcheck.max_dim},
                    {"step", c.gradcheck.step}};
  j["trends"] = {{"seeds", c.trends.seeds},
                 {"novel_fraction", c.trends.novel_fraction},
                 {"bank_sweep", c.trends.bank_sweep}};
  return j;
}

}  // namespace atl
