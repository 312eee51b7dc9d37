// Copyright 2026 The ATL Authors
// SPDX-License-Identifier: Apache-2.0

#include "atl/pipeline.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <stdexcept>
#include <string>

#include "atl/error.hpp"

namespace atl {
namespace {

void require(bool ok, const std::string& field, const std::string& rule) {
  if (!ok) throw ConfigError("train config: " + field + " " + rule);
}

bool finite_nonneg(double x) { return std::isfinite(x) && x >= 0.0; }

double learning_rate(const TrainConfig& cfg, std::int64_t step) {
  if (cfg.lr_decay_step > 0 && step >= cfg.lr_decay_step) return cfg.lr * cfg.lr_decay;
  return cfg.lr;
}

}  // namespace

void validate(const TrainConfig& cfg) {
  require(finite_nonneg(cfg.lambda1), "lambda1", "must be finite and >= 0");
  require(finite_nonneg(cfg.lambda2), "lambda2", "must be finite and >= 0");
  require(finite_nonneg(cfg.lambda_aux), "lambda_aux", "must be finite and >= 0");
  require(finite_nonneg(cfg.lr), "lr", "must be finite and >= 0");
  require(finite_nonneg(cfg.lr_decay), "lr_decay", "must be finite and >= 0");
  require(cfg.lr_decay_step >= 0, "lr_decay_step", "must be >= 0");
  require(cfg.iterations >= 0, "iterations", "must be >= 0");
  require(cfg.hoi_batch >= 1, "hoi_batch", "must be >= 1");
  require(cfg.object_batch >= 0, "object_batch", "must be >= 0");
  require(cfg.hidden_width >= 1, "hidden_width", "must be >= 1");
  require(cfg.spatial_hidden_width >= 1, "spatial_hidden_width", "must be >= 1");
  require(cfg.spatial_resolution >= 1 && cfg.spatial_resolution <= 64,
          "spatial_resolution", "must be in [1, 64]");
  require(cfg.trace_every >= 1, "trace_every", "must be >= 1");
}

HoiModel init_model(const Taxonomy& tax, int feat_dim, const TrainConfig& cfg) {
  validate(cfg);
  if (feat_dim < 1) throw std::invalid_argument("init_model: feat_dim must be positive");
  const std::uint64_t stream = stream_seed(cfg.seed, "init");
  const auto c = static_cast<std::size_t>(tax.num_categories());
  const auto d = static_cast<std::size_t>(feat_dim);
  const auto r = static_cast<std::size_t>(cfg.spatial_resolution);
  HoiModel m;
  m.spatial_resolution = cfg.spatial_resolution;
  m.feat_dim = feat_dim;
  m.spatial = init_params(2 * r * r + d, cfg.spatial_hidden_width, c, item_seed(stream, 0));
  m.interaction = init_params(2 * d, cfg.hidden_width, c, item_seed(stream, 1));
  if (cfg.lambda_aux > 0.0) {
    m.verb_head = init_params(d, cfg.hidden_width, static_cast<std::size_t>(tax.num_verbs()),
                              item_seed(stream, 2));
  }
  return m;
}

HoiModel zeros_like(const HoiModel& model) {
  HoiModel g = model;
  g.spatial = zeros_like(model.spatial);
  g.interaction = zeros_like(model.interaction);
  if (model.has_verb_head()) g.verb_head = zeros_like(model.verb_head);
  return g;
}

std::size_t SpatialMap::channel_sum(int channel) const {
  const std::size_t plane = static_cast<std::size_t>(resolution) * resolution;
  const auto first = bits.begin() + static_cast<std::ptrdiff_t>(channel * plane);
  return static_cast<std::size_t>(
      std::count(first, first + static_cast<std::ptrdiff_t>(plane), std::uint8_t{1}));
}

SpatialMap make_spatial_pattern(const Box& human, const Box& object, int resolution) {
  if (!human.valid() || !object.valid()) {
    throw std::invalid_argument("make_spatial_pattern: degenerate box");
  }
  if (resolution < 1) throw std::invalid_argument("make_spatial_pattern: resolution < 1");
  const Box frame = union_box(human, object);
  SpatialMap map{resolution,
                 std::vector<std::uint8_t>(2 * static_cast<std::size_t>(resolution) * resolution)};
  const double fw = frame.width() / resolution;
  const double fh = frame.height() / resolution;
  const Box boxes[2] = {human, object};
  for (int ch = 0; ch < 2; ++ch) {
    const Box& b = boxes[ch];
    for (int row = 0; row < resolution; ++row) {
      const double y = frame.y1 + (row + 0.5) * fh;
      if (y < b.y1 || y > b.y2) continue;
      for (int col = 0; col < resolution; ++col) {
        const double x = frame.x1 + (col + 0.5) * fw;
        if (x >= b.x1 && x <= b.x2) {
          map.bits[(static_cast<std::size_t>(ch) * resolution + row) * resolution + col] = 1;
        }
      }
    }
  }
  return map;
}

std::vector<double> spatial_input(const SpatialMap& map, std::span<const double> human_feat) {
  std::vector<double> x(map.bits.begin(), map.bits.end());
  x.insert(x.end(), human_feat.begin(), human_feat.end());
  return x;
}

std::vector<double> interaction_input(std::span<const double> verb_feat,
                                      std::span<const double> object_feat) {
  std::vector<double> x(verb_feat.begin(), verb_feat.end());
  x.insert(x.end(), object_feat.begin(), object_feat.end());
  return x;
}

std::vector<Composite> compose_batch(std::span<const VerbItem> verbs,
                                     std::span<const ObjectItem> objects,
                                     const Taxonomy& tax, std::size_t cap, Rng& rng) {
  std::vector<Composite> candidates;
  for (std::size_t i = 0; i < verbs.size(); ++i) {
    for (std::size_t j = 0; j < objects.size(); ++j) {
      Label label = compose_label(objects[j].objects, verbs[i].verbs, tax);
      if (std::none_of(label.begin(), label.end(), [](std::uint8_t b) { return b != 0; })) {
        continue;
      }
      candidates.push_back({interaction_input(verbs[i].feat, objects[j].feat),
                            std::move(label), static_cast<int>(i), static_cast<int>(j)});
    }
  }
  if (candidates.size() <= cap) return candidates;
  std::vector<std::size_t> pick(candidates.size());
  std::iota(pick.begin(), pick.end(), 0);
  std::shuffle(pick.begin(), pick.end(), rng);
  pick.resize(cap);
  std::sort(pick.begin(), pick.end());
  std::vector<Composite> kept;
  kept.reserve(cap);
  for (const std::size_t i : pick) kept.push_back(std::move(candidates[i]));
  return kept;
}

double total_loss(double sp_loss, double hoi_loss, double atl_loss, const TrainConfig& cfg) {
  for (const double l : {sp_loss, hoi_loss, atl_loss}) {
    if (!std::isfinite(l) || l < 0.0) {
      throw std::invalid_argument("total_loss: branch losses must be finite and >= 0");
    }
  }
  return sp_loss + cfg.lambda1 * hoi_loss + cfg.lambda2 * atl_loss;
}

PreparedExample prepare_example(const HoiInstance& inst, const Taxonomy& tax,
                                int spatial_resolution) {
  const SpatialMap map =
      make_spatial_pattern(inst.human_box, inst.object_box, spatial_resolution);
  return {spatial_input(map, inst.human_feat),
          interaction_input(inst.verb_feat, inst.object_feat), inst.hoi_label,
          decouple_verb(inst.hoi_label, tax)};
}

StepResult compute_step(const HoiModel& model, std::span<const PreparedExample* const> batch,
                        std::span<const Composite> composites, const TrainConfig& cfg) {
  if (batch.empty()) throw std::invalid_argument("compute_step: empty batch");
  StepResult r;
  r.grads = zeros_like(model);
  const double inv_b = 1.0 / static_cast<double>(batch.size());
  std::uint64_t pattern = 0;

  for (const PreparedExample* ex : batch) {
    r.losses.sp += inv_b * accumulate_gradient(model.spatial, ex->spatial, ex->label, inv_b,
                                               r.grads.spatial, {}, &pattern);
    r.losses.hoi += inv_b * accumulate_gradient(model.interaction, ex->interaction, ex->label,
                                                cfg.lambda1 * inv_b, r.grads.interaction, {},
                                                &pattern);
    if (model.has_verb_head() && cfg.lambda_aux > 0.0) {
      const std::span<const double> verb_feat(ex->interaction.data(),
                                              static_cast<std::size_t>(model.feat_dim));
      r.losses.aux += inv_b * accumulate_gradient(model.verb_head, verb_feat, ex->verbs,
                                                  cfg.lambda_aux * inv_b, r.grads.verb_head,
                                                  {}, &pattern);
    }
  }
  if (!composites.empty() && cfg.lambda2 > 0.0) {
    const double inv_n = 1.0 / static_cast<double>(composites.size());
    for (const Composite& comp : composites) {
      r.losses.atl += inv_n * accumulate_gradient(model.interaction, comp.input, comp.label,
                                                  cfg.lambda2 * inv_n, r.grads.interaction, {},
                                                  &pattern);
      ++r.composite_forward_calls;
    }
  }
  const bool finite = std::isfinite(r.losses.sp) && std::isfinite(r.losses.hoi) &&
                      std::isfinite(r.losses.atl) && std::isfinite(r.losses.aux);
  // A diverged model yields NaN here; train() turns that into DivergenceError.
  r.losses.total = finite ? total_loss(r.losses.sp, r.losses.hoi, r.losses.atl, cfg) +
                                cfg.lambda_aux * r.losses.aux
                          : std::numeric_limits<double>::quiet_NaN();
  r.relu_pattern = pattern;
  return r;
}

GradReport check_step_gradient(const HoiModel& model,
                               std::span<const PreparedExample* const> batch,
                               std::span<const Composite> composites,
                               const TrainConfig& cfg, double step) {
  HoiModel probe = model;
  const HoiModel grads = compute_step(model, batch, composites, cfg).grads;
  std::vector<ParamBlock> blocks = param_blocks("spatial.", probe.spatial, grads.spatial);
  for (auto& b : param_blocks("interaction.", probe.interaction, grads.interaction)) {
    blocks.push_back(b);
  }
  if (probe.has_verb_head()) {
    for (auto& b : param_blocks("verb_head.", probe.verb_head, grads.verb_head)) {
      blocks.push_back(b);
    }
  }
  return check_gradient(
      blocks,
      [&] {
        const StepResult r = compute_step(probe, batch, composites, cfg);
        return LossProbe{r.losses.total, r.relu_pattern};
      },
      step);
}

TrainResult train(std::span<const HoiInstance> train_set,
                  std::span<const ObjectInstance> external, const Taxonomy& tax,
                  const TrainConfig& cfg) {
  validate(cfg);
  if (train_set.empty()) throw std::invalid_argument("train: empty training set");
  const int feat_dim = static_cast<int>(train_set.front().verb_feat.size());
  TrainResult result{init_model(tax, feat_dim, cfg), {}, 0};
  HoiModel& model = result.model;

  std::vector<PreparedExample> prepared;
  prepared.reserve(train_set.size());
  for (const auto& inst : train_set) {
    prepared.push_back(prepare_example(inst, tax, cfg.spatial_resolution));
  }
  const bool use_atl = cfg.lambda2 > 0.0 && cfg.object_batch > 0 && !external.empty();

  Rng rng = make_rng(cfg.seed, "batching");
  std::vector<const PreparedExample*> batch(static_cast<std::size_t>(cfg.hoi_batch));
  std::vector<std::size_t> batch_index(batch.size());
  for (std::int64_t step = 0; step < cfg.iterations; ++step) {
    for (std::size_t b = 0; b < batch.size(); ++b) {
      batch_index[b] = uniform_index(rng, prepared.size());
      batch[b] = &prepared[batch_index[b]];
    }
    std::vector<Composite> composites;
    if (use_atl) {
      std::vector<VerbItem> verb_items;
      verb_items.reserve(batch.size());
      for (const std::size_t i : batch_index) {
        verb_items.push_back({train_set[i].verb_feat, prepared[i].verbs});
      }
      std::vector<ObjectItem> object_items;
      for (int j = 0; j < cfg.object_batch; ++j) {
        const ObjectInstance& obj = external[uniform_index(rng, external.size())];
        object_items.push_back({obj.object_feat, one_hot(obj.object_label, tax.num_objects())});
      }
      composites = compose_batch(verb_items, object_items, tax,
                                 static_cast<std::size_t>(cfg.object_batch), rng);
    }
    StepResult sr = compute_step(model, batch, composites, cfg);
    if (!std::isfinite(sr.losses.total)) {
      throw DivergenceError(step, "training diverged at step " + std::to_string(step));
    }
    result.composite_forward_calls += sr.composite_forward_calls;
    if (step % cfg.trace_every == 0 || step + 1 == cfg.iterations) {
      result.trace.push_back(
          {step, sr.losses.sp, sr.losses.hoi, sr.losses.atl, sr.losses.total});
    }
    const double lr = learning_rate(cfg, step);
    try {
      sgd_step(model.spatial, sr.grads.spatial, lr);
      sgd_step(model.interaction, sr.grads.interaction, lr);
      if (model.has_verb_head()) sgd_step(model.verb_head, sr.grads.verb_head, lr);
    } catch (const std::invalid_argument& e) {
      throw DivergenceError(step, std::string(e.what()) + " at step " + std::to_string(step));
    }
  }
  return result;
}

std::vector<double> predict_pair(std::span<const double> human_feat,
                                 std::span<const double> verb_feat,
                                 std::span<const double> object_feat, const Box& human,
                                 const Box& object, double s_h, double s_o,
                                 const HoiModel& model, const Taxonomy& tax) {
  if (!(s_h >= 0.0 && s_h <= 1.0) || !(s_o >= 0.0 && s_o <= 1.0)) {
    throw std::invalid_argument("predict_pair: detection scores must be in [0, 1]");
  }
  if (model.spatial.output_dim() != static_cast<std::size_t>(tax.num_categories()) ||
      model.interaction.output_dim() != static_cast<std::size_t>(tax.num_categories())) {
    throw std::invalid_argument("predict_pair: model does not match taxonomy");
  }
  const SpatialMap map = make_spatial_pattern(human, object, model.spatial_resolution);
  const MLPForward sp = mlp_forward(model.spatial, spatial_input(map, human_feat));
  const MLPForward hoi = mlp_forward(model.interaction, interaction_input(verb_feat, object_feat));
  std::vector<double> scores(sp.probs.size());
  for (std::size_t c = 0; c < scores.size(); ++c) {
    scores[c] = s_h * s_o * hoi.probs[c] * sp.probs[c];
  }
  return scores;
}

}  // namespace atl
