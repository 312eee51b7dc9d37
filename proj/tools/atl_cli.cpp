// Copyright 2026 The ATL Authors
// SPDX-License-Identifier: Apache-2.0

// atl: command-line driver for the HOI pipeline.
//
// Commands share one run directory by default, so a full experiment is
//
//   atl gen-data  --out run --seed 3
//   atl train     --out run
//   atl eval-hoi  --out run
//   atl zeroshot  --out run
//   atl build-bank --out run
//   atl affordance --out run
//
// Common flags: --config PATH (JSON, see atl/config.hpp), --seed N, --out DIR.
// The output directory defaults to $ATL_OUT_DIR, then ./atl_out. Inputs are
// read from --data DIR, which defaults to the output directory.
//
// Every command writes <command>.manifest.json next to its outputs with the
// effective configuration, its hash, and content hashes of every input and
// output file. Nothing time-dependent goes into any file, so two runs with
// the same inputs and seed produce byte-identical directories.
//
// Exit codes:
//   0  success
//   1  the command ran but its check failed (gradcheck, reproduce-trends)
//   2  configuration error (bad flag, bad config file, unknown key)
//   3  data error (missing or malformed input files)
//   4  training diverged

#include <CLI11.hpp>

#include <algorithm>
#include <cstdint>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <functional>
#include <iostream>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "atl/affordance.hpp"
#include "atl/config.hpp"
#include "atl/error.hpp"
#include "atl/evalkit.hpp"
#include "atl/experiment.hpp"
#include "atl/nn.hpp"
#include "atl/pipeline.hpp"
#include "atl/serialize.hpp"
#include "atl/split.hpp"
#include "atl/synthgen.hpp"

namespace fs = std::filesystem;

namespace {

enum ExitCode : int {
  kExitOk = 0,
  kExitCheckFailed = 1,
  kExitConfig = 2,
  kExitData = 3,
  kExitDivergence = 4,
};

constexpr const char* kOutDirEnv = "ATL_OUT_DIR";

// Thresholds gradcheck holds itself to.
constexpr double kMlpTolerance = 1e-4;
constexpr double kPipelineTolerance = 1e-3;

struct Options {
  std::string config_path;
  std::optional<std::uint64_t> seed;
  std::string out;
  std::string data;
  std::string checkpoint;
  std::string bank;
  std::string split;
  // Command-specific overrides.
  std::optional<std::int64_t> iterations;
  std::optional<double> lambda2;
  std::optional<int> bank_cap;
  std::optional<int> gradcheck_configs;
  std::vector<std::uint64_t> trend_seeds;
  bool baseline = false;
};

// Tracks what one command read and wrote, for the manifest.
class Session {
 public:
  Session(std::string command, atl::RunConfig cfg, fs::path out)
      : command_(std::move(command)), cfg_(std::move(cfg)), out_(std::move(out)) {}

  const atl::RunConfig& cfg() const { return cfg_; }
  const fs::path& out() const { return out_; }

  // Records an input file and returns its path unchanged.
  const fs::path& input(const fs::path& path) {
    if (!fs::exists(path)) throw atl::DataError(path.string() + ": no such file");
    inputs_.emplace_back(path.generic_string(), atl::text_hash(atl::read_text(path)));
    return path;
  }

  void write_text(const std::string& name, const std::string& text) {
    atl::write_text(out_ / name, text);
    outputs_.emplace_back((out_ / name).generic_string(), atl::text_hash(text));
  }
  void write_json(const std::string& name, const atl::Json& j) {
    write_text(name, j.dump(2) + "\n");
  }
  void write_jsonl(const std::string& name, const std::vector<atl::Json>& rows) {
    std::string text;
    for (const auto& r : rows) text += r.dump() + "\n";
    write_text(name, text);
  }

  void write_manifest() {
    atl::Json j;
    j["format"] = "atl-manifest";
    j["version"] = 1;
    j["command"] = command_;
    j["seed"] = cfg_.seed;
    const atl::Json config = atl::to_json(cfg_);
    j["config_hash"] = atl::content_hash(config);
    j["config"] = config;
    auto files = [](const auto& list) {
      atl::Json arr = atl::Json::array();
      for (const auto& [path, hash] : list) arr.push_back({{"path", path}, {"hash", hash}});
      return arr;
    };
    j["inputs"] = files(inputs_);
    j["outputs"] = files(outputs_);
    atl::write_text(out_ / (command_ + ".manifest.json"), j.dump(2) + "\n");
  }

 private:
  std::string command_;
  atl::RunConfig cfg_;
  fs::path out_;
  std::vector<std::pair<std::string, std::string>> inputs_;
  std::vector<std::pair<std::string, std::string>> outputs_;
};

fs::path default_out_dir() {
  const char* env = std::getenv(kOutDirEnv);
  return env && *env ? fs::path(env) : fs::path("atl_out");
}

atl::RunConfig load_config(const Options& opt) {
  atl::RunConfig cfg;
  if (!opt.config_path.empty()) {
    std::string text;
    try {
      text = atl::read_text(opt.config_path);
    } catch (const atl::DataError& e) {
      throw atl::ConfigError(e.what());
    }
    atl::Json j;
    try {
      j = atl::Json::parse(text);
    } catch (const atl::Json::parse_error& e) {
      throw atl::ConfigError(opt.config_path + ": " + e.what());
    }
    cfg = atl::run_config_from_json(j);
  }
  // Flags win over file values.
  if (opt.seed) cfg.seed = *opt.seed;
  if (opt.iterations) cfg.train.iterations = *opt.iterations;
  if (opt.lambda2) cfg.train.lambda2 = *opt.lambda2;
  if (opt.bank_cap) cfg.bank_cap = *opt.bank_cap;
  if (opt.gradcheck_configs) cfg.gradcheck.configs = *opt.gradcheck_configs;
  if (!opt.trend_seeds.empty()) cfg.trends.seeds = opt.trend_seeds;
  if (opt.baseline) cfg.train = atl::baseline_of(cfg.train);
  cfg.train.seed = cfg.seed;
  atl::validate(cfg);
  return cfg;
}

// Resolved input locations.
struct Inputs {
  fs::path data;
  fs::path checkpoint;
  fs::path bank;
  fs::path split;
};

Inputs resolve_inputs(const Options& opt, const fs::path& out) {
  Inputs in;
  in.data = opt.data.empty() ? out : fs::path(opt.data);
  in.checkpoint = opt.checkpoint.empty() ? in.data / "checkpoint.json" : fs::path(opt.checkpoint);
  in.bank = opt.bank.empty() ? in.data / "bank.json" : fs::path(opt.bank);
  in.split = opt.split.empty() ? in.data / "split.json" : fs::path(opt.split);
  return in;
}

atl::Taxonomy load_taxonomy(Session& s, const Inputs& in) {
  return atl::taxonomy_from_json(atl::read_json(s.input(in.data / "taxonomy.json")));
}

std::vector<atl::HoiInstance> load_hoi_set(Session& s, const fs::path& path,
                                           const atl::Taxonomy& tax) {
  return atl::read_hoi_set(s.input(path), tax);
}

atl::HoiModel load_checkpoint(Session& s, const Inputs& in, const atl::Taxonomy& tax) {
  atl::HoiModel model = atl::checkpoint_from_json(atl::read_json(s.input(in.checkpoint)));
  if (static_cast<int>(model.interaction.output_dim()) != tax.num_categories()) {
    throw atl::DataError(in.checkpoint.string() + ": model has " +
                         std::to_string(model.interaction.output_dim()) +
                         " categories but the taxonomy has " +
                         std::to_string(tax.num_categories()));
  }
  return model;
}

atl::SplitSpec load_split(Session& s, const Inputs& in, const atl::Taxonomy& tax) {
  atl::SplitSpec split = atl::split_from_json(atl::read_json(s.input(in.split)));
  atl::validate_split(split, tax);
  return split;
}

// Compact one-line JSON summary on stdout; logs go to stderr.
void emit(const atl::Json& summary) { std::cout << summary.dump() << "\n"; }

atl::Json groups_json(const atl::EvalReport& report) {
  atl::Json j = atl::Json::object();
  for (const auto& g : report.groups) j[g.name] = g.mean_ap;
  return j;
}

// ------------------------------------------------------------------ commands

atl::SplitSpec make_split(const atl::RunConfig& cfg, const atl::Taxonomy& tax) {
  const atl::SplitConfig& sc = cfg.split;
  switch (sc.mode) {
    case atl::SplitMode::kNone:
      return atl::no_split(tax);
    case atl::SplitMode::kNovelObject: {
      std::vector<int> objects = sc.unseen_objects;
      if (objects.empty()) {
        atl::Rng rng = atl::make_rng(cfg.seed, "split");
        objects = atl::choose_novel_objects(tax, sc.novel_fraction, rng);
      }
      for (const int o : objects) {
        if (o < 0 || o >= tax.num_objects()) {
          throw atl::ConfigError("split.unseen_objects: object " + std::to_string(o) +
                                 " is out of range");
        }
      }
      return atl::make_novel_object_split(tax, objects);
    }
    default: {
      const int count = sc.unseen_count > 0 ? sc.unseen_count : atl::default_unseen_count(tax);
      if (count >= tax.num_categories()) {
        throw atl::ConfigError("split.unseen_count must be below the category count");
      }
      return atl::make_composition_split(tax, sc.mode, count);
    }
  }
}

int cmd_gen_data(Session& s) {
  const atl::RunConfig& cfg = s.cfg();
  atl::WorldParams wp = cfg.world;
  wp.seed = cfg.seed;
  const atl::World world = atl::gen_world(wp);
  for (const auto& w : world.warnings) std::cerr << "warning: " << w << "\n";
  const atl::SplitSpec split = make_split(cfg, world.taxonomy);
  const atl::Dataset ds = atl::gen_dataset(world.spec, world.taxonomy, split, cfg.sizes,
                                           atl::stream_seed(cfg.seed, "data"));

  s.write_json("taxonomy.json", atl::to_json(ds.taxonomy));
  s.write_json("world.json", atl::to_json(world.spec));
  s.write_json("split.json", atl::to_json(split));
  std::vector<atl::Json> rows;
  for (const auto& inst : ds.train) rows.push_back(atl::to_json(inst));
  s.write_jsonl("train.jsonl", rows);
  rows.clear();
  for (const auto& inst : ds.test) rows.push_back(atl::to_json(inst));
  s.write_jsonl("test.jsonl", rows);
  rows.clear();
  for (const auto& inst : ds.external) rows.push_back(atl::to_json(inst));
  s.write_jsonl("external.jsonl", rows);

  emit({{"command", "gen-data"},
        {"verbs", ds.taxonomy.num_verbs()},
        {"objects", ds.taxonomy.num_objects()},
        {"categories", ds.taxonomy.num_categories()},
        {"unseen_categories", split.unseen_hoi_ids.size()},
        {"train", ds.train.size()},
        {"test", ds.test.size()},
        {"external", ds.external.size()}});
  return kExitOk;
}

int cmd_train(Session& s, const Inputs& in) {
  const atl::TrainConfig& tc = s.cfg().train;
  const atl::Taxonomy tax = load_taxonomy(s, in);
  const auto train_set = load_hoi_set(s, in.data / "train.jsonl", tax);
  if (train_set.empty()) throw atl::DataError("train.jsonl holds no instances");
  std::vector<atl::ObjectInstance> external;
  if (tc.lambda2 > 0.0 && tc.object_batch > 0) {
    external = atl::read_object_set(s.input(in.data / "external.jsonl"), tax);
  }
  std::cerr << "training " << tc.iterations << " iterations on " << train_set.size()
            << " instances, " << external.size() << " external objects\n";
  const atl::TrainResult result = atl::train(train_set, external, tax, tc);

  s.write_json("checkpoint.json", atl::to_json(result.model, tc));
  s.write_text("loss_trace.csv", atl::loss_trace_csv(result.trace));
  atl::Json summary{{"command", "train"},
                    {"iterations", tc.iterations},
                    {"composite_forward_calls", result.composite_forward_calls}};
  if (!result.trace.empty()) {
    const auto& last = result.trace.back();
    summary["final_loss"] = {
        {"sp", last.sp}, {"hoi", last.hoi}, {"atl", last.atl}, {"total", last.total}};
  }
  emit(summary);
  return kExitOk;
}

int evaluate(Session& s, const Inputs& in, bool zero_shot) {
  const atl::Taxonomy tax = load_taxonomy(s, in);
  const auto test = load_hoi_set(s, in.data / "test.jsonl", tax);
  if (test.empty()) throw atl::DataError("test.jsonl holds no instances");
  const atl::HoiModel model = load_checkpoint(s, in, tax);
  atl::SplitSpec split = atl::no_split(tax);
  if (zero_shot) {
    split = load_split(s, in, tax);
    if (split.mode == atl::SplitMode::kNone) {
      throw atl::DataError(in.split.string() + ": split mode is none; zeroshot needs a split");
    }
  }
  const auto preds = atl::predict_test_set(model, tax, test);
  const atl::EvalReport report = atl::map_report(preds, atl::ground_truth_of(test), tax, split);

  const std::string stem = zero_shot ? "zeroshot_report" : "eval_report";
  if (!zero_shot) {
    std::vector<atl::Json> rows;
    rows.reserve(preds.size());
    for (const auto& d : preds) rows.push_back(atl::to_json(d));
    s.write_jsonl("predictions.jsonl", rows);
  }
  s.write_json(stem + ".json", atl::to_json(report, tax));
  s.write_text(stem + ".csv", atl::report_csv(report, tax));
  emit({{"command", zero_shot ? "zeroshot" : "eval-hoi"},
        {"split", std::string(atl::to_string(split.mode))},
        {"map", groups_json(report)}});
  return kExitOk;
}

int cmd_build_bank(Session& s, const Inputs& in) {
  const atl::Taxonomy tax = load_taxonomy(s, in);
  const auto train_set = load_hoi_set(s, in.data / "train.jsonl", tax);
  const atl::AffordanceBank bank = atl::build_bank(train_set, tax, s.cfg().bank_cap, s.cfg().seed);
  if (bank.empty()) std::cerr << "warning: the affordance bank is empty\n";
  s.write_json("bank.json", atl::to_json(bank));
  atl::Json counts = atl::Json::object();
  for (int v = 0; v < tax.num_verbs(); ++v) counts[tax.verb_names()[v]] = bank.count(v);
  emit({{"command", "build-bank"}, {"M", bank.cap}, {"entries", counts}});
  return kExitOk;
}

// Objects whose categories are all held out; every object without a split.
std::vector<int> query_objects(const atl::SplitSpec& split, const atl::Taxonomy& tax) {
  std::vector<int> objects;
  for (int o = 0; o < tax.num_objects(); ++o) {
    const auto& cats = tax.categories_of_object(o);
    const bool unseen = !cats.empty() && std::all_of(cats.begin(), cats.end(), [&](int c) {
      return split.is_unseen(c);
    });
    if (split.mode == atl::SplitMode::kNone || unseen) objects.push_back(o);
  }
  return objects;
}

int cmd_affordance(Session& s, const Inputs& in) {
  const atl::RunConfig& cfg = s.cfg();
  const atl::Taxonomy tax = load_taxonomy(s, in);
  const atl::WorldSpec world = atl::world_from_json(atl::read_json(s.input(in.data / "world.json")));
  const atl::SplitSpec split = load_split(s, in, tax);
  const atl::HoiModel model = load_checkpoint(s, in, tax);
  const atl::AffordanceBank bank = atl::bank_from_json(atl::read_json(s.input(in.bank)));
  atl::validate(bank, tax);
  if (bank.empty()) throw atl::DataError(in.bank.string() + ": the affordance bank is empty");

  const std::vector<int> objects = query_objects(split, tax);
  if (objects.empty()) throw atl::DataError("no held-out objects to query");
  const auto queries = atl::sample_queries(world, tax, objects,
                                           cfg.affordance.queries_per_object, cfg.seed);
  const atl::AffordanceEval eval =
      atl::evaluate_affordance(model, bank, tax, queries, cfg.affordance.hoi_threshold,
                               cfg.affordance.keep_threshold);

  // Per object: mean F/S over its queries and the fraction of queries keeping
  // each verb.
  struct Acc {
    std::vector<double> sum;
    std::vector<int> defined;
    std::vector<int> kept;
    int queries = 0;
  };
  std::map<int, Acc> per_object;
  for (std::size_t q = 0; q < eval.scores.size(); ++q) {
    Acc& a = per_object[eval.objects[q]];
    if (a.sum.empty()) {
      a.sum.assign(tax.num_verbs(), 0.0);
      a.defined.assign(tax.num_verbs(), 0);
      a.kept.assign(tax.num_verbs(), 0);
    }
    ++a.queries;
    for (int v = 0; v < tax.num_verbs(); ++v) {
      if (const auto sc = eval.scores[q].score[v]) {
        a.sum[v] += *sc;
        ++a.defined[v];
      }
    }
    for (const int v : eval.scores[q].kept) ++a.kept[v];
  }

  std::printf("%-12s %4s  %-12s %8s %6s %5s\n", "object", "rank", "verb", "score", "kept",
              "valid");
  atl::Json ranked = atl::Json::array();
  for (const auto& [object, a] : per_object) {
    const auto truth = tax.affordances_of(object);
    std::vector<std::pair<double, int>> order;
    for (int v = 0; v < tax.num_verbs(); ++v) {
      if (a.defined[v] > 0) order.emplace_back(a.sum[v] / a.defined[v], v);
    }
    std::stable_sort(order.begin(), order.end(),
                     [](const auto& x, const auto& y) { return x.first > y.first; });
    atl::Json verbs = atl::Json::array();
    int rank = 1;
    for (const auto& [score, v] : order) {
      const double kept = static_cast<double>(a.kept[v]) / a.queries;
      const bool valid = std::find(truth.begin(), truth.end(), v) != truth.end();
      std::printf("%-12s %4d  %-12s %8.4f %6.2f %5s\n", tax.object_names()[object].c_str(),
                  rank++, tax.verb_names()[v].c_str(), score, kept, valid ? "yes" : "no");
      verbs.push_back({{"verb", tax.verb_names()[v]},
                       {"mean_score", score},
                       {"kept_fraction", kept},
                       {"valid", valid}});
    }
    ranked.push_back({{"object", tax.object_names()[object]},
                      {"queries", a.queries},
                      {"verbs", verbs}});
  }

  atl::Json out;
  out["format"] = "atl-affordance-report";
  out["version"] = 1;
  out["hoi_threshold"] = cfg.affordance.hoi_threshold;
  out["keep_threshold"] = cfg.affordance.keep_threshold;
  out["bank_cap"] = bank.cap;
  out["micro"] = atl::to_json(eval.prf1.micro);
  out["macro"] = atl::to_json(eval.prf1.macro);
  out["map"] = eval.map ? atl::Json(*eval.map) : atl::Json(nullptr);
  out["objects"] = ranked;
  atl::Json per_query = atl::Json::array();
  for (std::size_t q = 0; q < eval.scores.size(); ++q) {
    per_query.push_back({{"object", tax.object_names()[eval.objects[q]]},
                         {"scores", atl::to_json(eval.scores[q], tax)}});
  }
  out["queries"] = per_query;
  s.write_json("affordance.json", out);

  emit({{"command", "affordance"},
        {"queries", queries.size()},
        {"micro_f1", eval.prf1.micro.f1},
        {"map", out["map"]}});
  return kExitOk;
}

int cmd_gradcheck(Session& s) {
  const atl::GradcheckConfig& gc = s.cfg().gradcheck;
  atl::Rng rng = atl::make_rng(s.cfg().seed, "gradcheck");
  const auto dim = [&] { return 1 + atl::uniform_index(rng, gc.max_dim); };
  atl::Json configs = atl::Json::array();
  double worst = 0.0;
  for (int t = 0; t < gc.configs; ++t) {
    const std::size_t d = dim(), h = dim(), k = dim();
    const auto params = atl::init_params(d, h, k, rng());
    std::vector<double> x(d);
    for (double& v : x) v = atl::uniform(rng, -1, 1);
    atl::Label target(k);
    for (auto& b : target) b = atl::uniform(rng, 0, 1) < 0.4;
    const atl::GradReport r = atl::grad_check(params, x, target, gc.step);
    worst = std::max(worst, r.max_rel_error);
    configs.push_back({{"input", d},
                       {"hidden", h},
                       {"outputs", k},
                       {"checked", r.checked},
                       {"max_rel_error", r.max_rel_error}});
  }
  const atl::MiniatureGradCheck mini = atl::miniature_grad_check(s.cfg().seed, gc.step);
  const bool pass = worst < kMlpTolerance && mini.report.max_rel_error < kPipelineTolerance;

  atl::Json out;
  out["format"] = "atl-gradcheck";
  out["version"] = 1;
  out["step"] = gc.step;
  out["mlp_tolerance"] = kMlpTolerance;
  out["pipeline_tolerance"] = kPipelineTolerance;
  out["mlp_max_rel_error"] = worst;
  out["mlp_configs"] = configs;
  out["pipeline"] = atl::to_json(mini.report);
  out["pipeline_composites"] = mini.composites;
  out["pass"] = pass;
  s.write_json("gradcheck.json", out);
  emit({{"command", "gradcheck"},
        {"mlp_max_rel_error", worst},
        {"pipeline_max_rel_error", mini.report.max_rel_error},
        {"pass", pass}});
  return pass ? kExitOk : kExitCheckFailed;
}

int cmd_reproduce_trends(Session& s) {
  const atl::RunConfig& cfg = s.cfg();
  atl::TrendConfig tc;
  tc.world = cfg.world;
  tc.sizes = cfg.sizes;
  tc.train = cfg.train;
  tc.novel_fraction = cfg.trends.novel_fraction;
  tc.bank_cap = cfg.bank_cap;
  tc.queries_per_object = cfg.affordance.queries_per_object;
  tc.hoi_threshold = cfg.affordance.hoi_threshold;
  tc.keep_threshold = cfg.affordance.keep_threshold;
  tc.bank_sweep = cfg.trends.bank_sweep;

  std::vector<atl::TrendRow> rows;
  for (const std::uint64_t seed : cfg.trends.seeds) {
    std::cerr << "seed " << seed << "...\n";
    rows.push_back(atl::run_trend_seed(tc, seed));
  }

  using Metric = std::function<double(const atl::ModelMetrics&)>;
  const std::vector<std::pair<std::string, Metric>> metrics{
      {"full_map", [](const auto& m) { return m.full_map; }},
      {"unseen_map", [](const auto& m) { return m.unseen_map; }},
      {"seen_map", [](const auto& m) { return m.seen_map; }},
      {"rare_map", [](const auto& m) { return m.rare_map; }},
      {"nonrare_map", [](const auto& m) { return m.nonrare_map; }},
      {"affordance_precision", [](const auto& m) { return m.affordance_micro.precision; }},
      {"affordance_recall", [](const auto& m) { return m.affordance_micro.recall; }},
      {"affordance_f1", [](const auto& m) { return m.affordance_micro.f1; }},
      {"affordance_map", [](const auto& m) { return m.affordance_map; }},
  };

  std::ostringstream csv;
  csv << "seed,model";
  for (const auto& [name, f] : metrics) csv << "," << name;
  csv << "\n";
  atl::Json per_seed = atl::Json::array();
  for (const auto& r : rows) {
    for (const auto* which : {"baseline", "atl"}) {
      const atl::ModelMetrics& m = std::string(which) == "atl" ? r.atl : r.baseline;
      csv << r.seed << "," << which;
      for (const auto& [name, f] : metrics) csv << "," << atl::format_double(f(m));
      csv << "\n";
    }
    atl::Json sweep = atl::Json::array();
    for (const auto& [cap, map] : r.atl_bank_sweep) sweep.push_back({{"M", cap}, {"map", map}});
    per_seed.push_back({{"seed", r.seed}, {"novel_objects", r.novel_objects}, {"bank_sweep", sweep}});
  }

  atl::Json medians;
  for (const auto* which : {"baseline", "atl"}) {
    atl::Json m = atl::Json::object();
    for (const auto& [name, f] : metrics) {
      std::vector<double> v;
      for (const auto& r : rows) v.push_back(f(std::string(which) == "atl" ? r.atl : r.baseline));
      m[name] = atl::median(v);
    }
    medians[which] = m;
  }
  atl::Json sweep_medians = atl::Json::array();
  for (std::size_t i = 0; i < cfg.trends.bank_sweep.size(); ++i) {
    std::vector<double> v;
    for (const auto& r : rows) v.push_back(r.atl_bank_sweep[i].second);
    sweep_medians.push_back({{"M", cfg.trends.bank_sweep[i]}, {"map", atl::median(v)}});
  }

  const auto med = [&](const char* which, const char* name) {
    return medians[which][name].get<double>();
  };
  atl::Json checks;
  checks["unseen_gain"] = med("atl", "unseen_map") / med("baseline", "unseen_map") - 1.0;
  checks["seen_change"] = med("atl", "seen_map") / med("baseline", "seen_map") - 1.0;
  checks["affordance_f1_gain"] = med("atl", "affordance_f1") - med("baseline", "affordance_f1");
  checks["affordance_map_higher"] = med("atl", "affordance_map") > med("baseline", "affordance_map");
  const bool pass = checks["unseen_gain"].get<double>() >= 0.10 &&
                    checks["seen_change"].get<double>() >= -0.05 &&
                    checks["affordance_f1_gain"].get<double>() >= 0.10 &&
                    checks["affordance_map_higher"].get<bool>();
  checks["pass"] = pass;

  atl::Json out;
  out["format"] = "atl-trends";
  out["version"] = 1;
  out["bank_cap"] = cfg.bank_cap;
  out["medians"] = medians;
  out["bank_sweep_medians"] = sweep_medians;
  out["checks"] = checks;
  out["per_seed"] = per_seed;
  s.write_text("trends.csv", csv.str());
  s.write_json("trends.json", out);

  std::cout << "model";
  for (const auto& [name, f] : metrics) std::cout << "," << name;
  std::cout << "\n";
  for (const auto* which : {"baseline", "atl"}) {
    std::cout << "median_" << which;
    for (const auto& [name, f] : metrics) {
      std::cout << "," << atl::format_double(medians[which][name].get<double>());
    }
    std::cout << "\n";
  }
  emit({{"command", "reproduce-trends"}, {"checks", checks}});
  return pass ? kExitOk : kExitCheckFailed;
}

// ------------------------------------------------------------------ driver

int run_guarded(const std::function<int()>& body) {
  try {
    return body();
  } catch (const atl::ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return kExitConfig;
  } catch (const atl::DivergenceError& e) {
    std::cerr << "divergence: " << e.what() << "\n";
    return kExitDivergence;
  } catch (const atl::DataError& e) {
    std::cerr << "data error: " << e.what() << "\n";
    return kExitData;
  } catch (const atl::Json::exception& e) {
    std::cerr << "data error: " << e.what() << "\n";
    return kExitData;
  } catch (const std::invalid_argument& e) {
    // Configuration has been validated by now, so a rejected precondition
    // means the inputs disagree with each other.
    std::cerr << "data error: " << e.what() << "\n";
    return kExitData;
  } catch (const std::out_of_range& e) {
    std::cerr << "data error: " << e.what() << "\n";
    return kExitData;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitCheckFailed;
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Affordance transfer learning for human-object interaction detection"};
  app.require_subcommand(1);
  Options opt;

  const auto common = [&](CLI::App* sub) {
    sub->add_option("--config", opt.config_path, "JSON run configuration");
    sub->add_option_function<std::uint64_t>(
        "--seed", [&](const std::uint64_t& v) { opt.seed = v; }, "master seed");
    sub->add_option("--out", opt.out, "output directory (default $ATL_OUT_DIR or atl_out)");
  };
  const auto data = [&](CLI::App* sub) {
    sub->add_option("--data", opt.data, "directory written by gen-data (default: --out)");
  };
  const auto checkpoint = [&](CLI::App* sub) {
    sub->add_option("--checkpoint", opt.checkpoint, "model checkpoint (default DATA/checkpoint.json)");
  };

  struct Command {
    CLI::App* app;
    std::function<int(Session&, const Inputs&)> run;
  };
  std::vector<Command> commands;

  auto* gen = app.add_subcommand("gen-data", "generate a synthetic world, split and dataset");
  common(gen);
  commands.push_back({gen, [](Session& s, const Inputs&) { return cmd_gen_data(s); }});

  auto* tr = app.add_subcommand("train", "train a model on DATA/train.jsonl");
  common(tr);
  data(tr);
  tr->add_option_function<std::int64_t>(
      "--iterations", [&](const std::int64_t& v) { opt.iterations = v; }, "training steps");
  tr->add_option_function<double>(
      "--lambda2", [&](const double& v) { opt.lambda2 = v; }, "weight of the composite loss");
  tr->add_flag("--baseline", opt.baseline, "train without composites (lambda2 = 0)");
  commands.push_back({tr, cmd_train});

  auto* ev = app.add_subcommand("eval-hoi", "mAP of a checkpoint on DATA/test.jsonl");
  common(ev);
  data(ev);
  checkpoint(ev);
  commands.push_back({ev, [](Session& s, const Inputs& in) { return evaluate(s, in, false); }});

  auto* zs = app.add_subcommand("zeroshot", "Unseen/Seen mAP under the generated split");
  common(zs);
  data(zs);
  checkpoint(zs);
  zs->add_option("--split", opt.split, "split file (default DATA/split.json)");
  commands.push_back({zs, [](Session& s, const Inputs& in) { return evaluate(s, in, true); }});

  auto* bb = app.add_subcommand("build-bank", "sample the affordance feature bank");
  common(bb);
  data(bb);
  bb->add_option_function<int>("--M", [&](const int& v) { opt.bank_cap = v; },
                               "entries per verb");
  commands.push_back({bb, cmd_build_bank});

  auto* af = app.add_subcommand("affordance", "recognize affordances of held-out objects");
  common(af);
  data(af);
  checkpoint(af);
  af->add_option("--bank", opt.bank, "bank file (default DATA/bank.json)");
  af->add_option("--split", opt.split, "split file (default DATA/split.json)");
  commands.push_back({af, cmd_affordance});

  auto* gc = app.add_subcommand("gradcheck", "finite-difference gradient verification");
  common(gc);
  gc->add_option_function<int>(
      "--configs", [&](const int& v) { opt.gradcheck_configs = v; }, "random MLP configurations");
  commands.push_back({gc, [](Session& s, const Inputs&) { return cmd_gradcheck(s); }});

  auto* rt = app.add_subcommand("reproduce-trends", "ATL vs Baseline on novel-object splits");
  common(rt);
  rt->add_option("--seeds", opt.trend_seeds, "seeds to run (default from config)");
  commands.push_back({rt, [](Session& s, const Inputs&) { return cmd_reproduce_trends(s); }});

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? kExitOk : kExitConfig;
  }

  for (const auto& c : commands) {
    if (!c.app->parsed()) continue;
    return run_guarded([&] {
      const atl::RunConfig cfg = load_config(opt);
      const fs::path out = opt.out.empty() ? default_out_dir() : fs::path(opt.out);
      std::error_code ec;
      fs::create_directories(out, ec);
      if (ec) throw atl::ConfigError(out.string() + ": " + ec.message());
      Session session(c.app->get_name(), cfg, out);
      if (!opt.config_path.empty()) session.input(opt.config_path);
      const int rc = c.run(session, resolve_inputs(opt, out));
      session.write_manifest();
      return rc;
    });
  }
  return kExitConfig;
}
