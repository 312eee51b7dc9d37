// Copyright 2026 The ATL Authors
// SPDX-License-Identifier: Apache-2.0

#include "atl/experiment.hpp"

#include <algorithm>
#include <stdexcept>

namespace atl {
namespace {

Box jitter_box(const Box& b, double rel, Rng& rng) {
  if (rel <= 0.0) return b;
  const double w = b.width();
  const double h = b.height();
  Box out{b.x1 + gaussian(rng, rel * w), b.y1 + gaussian(rng, rel * h),
          b.x2 + gaussian(rng, rel * w), b.y2 + gaussian(rng, rel * h)};
  if (!out.valid()) return b;
  return out;
}

ModelMetrics measure(const HoiModel& model, const Dataset& ds, const SplitSpec& split,
                     const AffordanceBank& bank, std::span<const ObjectInstance> queries,
                     const TrendConfig& cfg) {
  const auto preds = predict_test_set(model, ds.taxonomy, ds.test);
  const auto gts = ground_truth_of(ds.test);
  const EvalReport report = map_report(preds, gts, ds.taxonomy, split);
  ModelMetrics m;
  m.full_map = report.group("Full").mean_ap;
  m.rare_map = report.group("Rare").mean_ap;
  m.nonrare_map = report.group("NonRare").mean_ap;
  m.unseen_map = report.group("Unseen").mean_ap;
  m.seen_map = report.group("Seen").mean_ap;
  const AffordanceEval aff = evaluate_affordance(model, bank, ds.taxonomy, queries,
                                                 cfg.hoi_threshold, cfg.keep_threshold);
  m.affordance_micro = aff.prf1.micro;
  m.affordance_map = aff.map.value_or(0.0);
  return m;
}

}  // namespace

std::vector<Detection> predict_test_set(const HoiModel& model, const Taxonomy& tax,
                                        std::span<const HoiInstance> test,
                                        const PredictOptions& options) {
  std::vector<Detection> out;
  out.reserve(test.size() * static_cast<std::size_t>(tax.num_categories()));
  const std::uint64_t stream = stream_seed(options.seed, "jitter");
  for (std::size_t i = 0; i < test.size(); ++i) {
    const HoiInstance& inst = test[i];
    Rng rng(item_seed(stream, i));
    const Box human = jitter_box(inst.human_box, options.box_jitter, rng);
    const Box object = jitter_box(inst.object_box, options.box_jitter, rng);
    const auto scores =
        predict_pair(inst.human_feat, inst.verb_feat, inst.object_feat, human, object,
                     options.human_score, options.object_score, model, tax);
    for (int c = 0; c < tax.num_categories(); ++c) {
      out.push_back({static_cast<std::int64_t>(i), human, object, c, scores[c]});
    }
  }
  return out;
}

std::vector<GroundTruth> ground_truth_of(std::span<const HoiInstance> test) {
  std::vector<GroundTruth> out;
  for (std::size_t i = 0; i < test.size(); ++i) {
    for (std::size_t c = 0; c < test[i].hoi_label.size(); ++c) {
      if (test[i].hoi_label[c]) {
        out.push_back({static_cast<std::int64_t>(i), test[i].human_box, test[i].object_box,
                       static_cast<int>(c)});
      }
    }
  }
  return out;
}

AffordanceEval evaluate_affordance(const HoiModel& model, const AffordanceBank& bank,
                                   const Taxonomy& tax, std::span<const ObjectInstance> queries,
                                   double hoi_threshold, double keep_threshold) {
  AffordanceEval eval;
  std::vector<std::vector<int>> kept;
  std::vector<std::vector<std::optional<double>>> table;
  for (const ObjectInstance& q : queries) {
    eval.objects.push_back(q.object_label);
    eval.scores.push_back(
        recognize(q.object_feat, bank, model, tax, hoi_threshold, keep_threshold));
    eval.truth.push_back(tax.affordances_of(q.object_label));
    kept.push_back(eval.scores.back().kept);
    table.push_back(eval.scores.back().score);
  }
  eval.prf1 = affordance_prf1(kept, eval.truth);
  eval.map = affordance_map(table, eval.truth, tax.num_verbs());
  return eval;
}

std::vector<ObjectInstance> sample_queries(const WorldSpec& world, const Taxonomy& tax,
                                           std::span<const int> objects, int per_object,
                                           std::uint64_t seed) {
  if (per_object < 1) throw std::invalid_argument("sample_queries: per_object must be >= 1");
  std::vector<ObjectInstance> out;
  const std::uint64_t stream = stream_seed(seed, "query");
  std::uint64_t index = 0;
  for (const int o : objects) {
    for (int k = 0; k < per_object; ++k) {
      Rng rng(item_seed(stream, index++));
      out.push_back(sample_object_instance(world, tax, o, rng));
    }
  }
  return out;
}

TrainConfig desk_train_config() {
  TrainConfig cfg;
  // Mean-over-classes BCE divides every logit gradient by C, so the usual
  // 0.01 needs ~10^6 steps; 2000 steps at 2.0 reach the same regime.
  cfg.lr = 2.0;
  cfg.iterations = 2000;
  cfg.hoi_batch = 32;
  cfg.object_batch = 8;
  cfg.hidden_width = 1024;
  cfg.spatial_hidden_width = 256;
  cfg.spatial_resolution = 16;
  cfg.trace_every = 10;
  return cfg;
}

TrainConfig baseline_of(const TrainConfig& cfg) {
  TrainConfig b = cfg;
  b.lambda2 = 0.0;
  b.object_batch = 0;
  return b;
}

TrendRow run_trend_seed(const TrendConfig& cfg, std::uint64_t seed) {
  WorldParams wp = cfg.world;
  wp.seed = seed;
  const World world = gen_world(wp);
  Rng split_rng = make_rng(seed, "split");
  TrendRow row;
  row.seed = seed;
  row.novel_objects = choose_novel_objects(world.taxonomy, cfg.novel_fraction, split_rng);
  const SplitSpec split = make_novel_object_split(world.taxonomy, row.novel_objects);
  const Dataset ds =
      gen_dataset(world.spec, world.taxonomy, split, cfg.sizes, stream_seed(seed, "data"));

  TrainConfig atl_cfg = cfg.train;
  atl_cfg.seed = seed;
  const TrainConfig base_cfg = baseline_of(atl_cfg);
  const HoiModel atl_model = train(ds.train, ds.external, ds.taxonomy, atl_cfg).model;
  const HoiModel base_model = train(ds.train, {}, ds.taxonomy, base_cfg).model;

  const AffordanceBank bank = build_bank(ds.train, ds.taxonomy, cfg.bank_cap, seed);
  const auto queries =
      sample_queries(world.spec, ds.taxonomy, row.novel_objects, cfg.queries_per_object, seed);
  row.atl = measure(atl_model, ds, split, bank, queries, cfg);
  row.baseline = measure(base_model, ds, split, bank, queries, cfg);
  for (const int cap : cfg.bank_sweep) {
    const AffordanceBank swept = build_bank(ds.train, ds.taxonomy, cap, seed);
    const AffordanceEval aff = evaluate_affordance(atl_model, swept, ds.taxonomy, queries,
                                                   cfg.hoi_threshold, cfg.keep_threshold);
    row.atl_bank_sweep.emplace_back(cap, aff.map.value_or(0.0));
  }
  return row;
}

double median(std::vector<double> values) {
  if (values.empty()) throw std::invalid_argument("median of empty set");
  std::sort(values.begin(), values.end());
  const std::size_t n = values.size();
  return n % 2 ? values[n / 2] : 0.5 * (values[n / 2 - 1] + values[n / 2]);
}

MiniatureGradCheck miniature_grad_check(std::uint64_t seed, double step) {
  WorldParams wp;
  wp.num_verbs = 3;
  wp.num_objects = 3;
  wp.num_pairs = 6;
  wp.feat_dim = 4;
  wp.seed = seed;
  const World world = gen_world(wp);
  const Dataset ds = gen_dataset(world.spec, world.taxonomy, no_split(world.taxonomy),
                                 {40, 1, 20}, stream_seed(seed, "data"));
  TrainConfig cfg;
  cfg.hidden_width = 8;
  cfg.spatial_hidden_width = 8;
  cfg.spatial_resolution = 4;
  cfg.seed = seed;
  const HoiModel model = init_model(ds.taxonomy, wp.feat_dim, cfg);

  std::vector<PreparedExample> prepared;
  std::vector<VerbItem> verbs;
  for (std::size_t i = 0; i < 4; ++i) {
    prepared.push_back(prepare_example(ds.train[i], ds.taxonomy, cfg.spatial_resolution));
    verbs.push_back({ds.train[i].verb_feat, prepared.back().verbs});
  }
  std::vector<const PreparedExample*> batch;
  for (const auto& p : prepared) batch.push_back(&p);
  std::vector<ObjectItem> objects;
  for (std::size_t j = 0; j < 6; ++j) {
    objects.push_back({ds.external[j].object_feat,
                       one_hot(ds.external[j].object_label, wp.num_objects)});
  }
  Rng rng = make_rng(seed, "batching");
  const auto composites = compose_batch(verbs, objects, ds.taxonomy, 6, rng);
  return {check_step_gradient(model, batch, composites, cfg, step), composites.size()};
}

}  // namespace atl
