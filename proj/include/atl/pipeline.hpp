// Copyright 2026 The ATL Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

// Three-branch HOI training.
//
//   spatial branch     sp(map(b_h, b_o) ++ human_feat)       -> L_sp
//   real HOI branch    hoi(verb_feat ++ object_feat)         -> L_hoi
//   composite branch   hoi(verb_feat ++ external obj feat)   -> L_atl
//
// Both HOI branches run the same classifier. The objective is
// L = L_sp + lambda1 * L_hoi + lambda2 * L_atl (+ lambda_aux * L_aux when the
// optional verb head is enabled).

#include <cstdint>
#include <span>
#include <vector>

#include "atl/box.hpp"
#include "atl/nn.hpp"
#include "atl/rng.hpp"
#include "atl/synthgen.hpp"
#include "atl/taxonomy.hpp"

namespace atl {

struct TrainConfig {
  double lambda1 = 2.0;
  double lambda2 = 0.5;
  double lambda_aux = 0.0;
  double lr = 0.01;
  // lr is multiplied by lr_decay once step reaches lr_decay_step (0 = never).
  std::int64_t lr_decay_step = 0;
  double lr_decay = 0.1;
  std::int64_t iterations = 1000;
  int hoi_batch = 32;
  // External-object instances per step; also the composite cap.
  int object_batch = 8;
  std::size_t hidden_width = 1024;
  std::size_t spatial_hidden_width = 1024;
  int spatial_resolution = 16;
  std::int64_t trace_every = 10;
  std::uint64_t seed = 1;
};

// Throws ConfigError naming the offending field.
void validate(const TrainConfig& cfg);

struct HoiModel {
  MLPParams spatial;      // (2 * R * R + D) -> C
  MLPParams interaction;  // (2 * D) -> C, shared by real and composite branches
  MLPParams verb_head;    // D -> N_v; empty unless lambda_aux > 0
  int spatial_resolution = 16;
  int feat_dim = 0;

  bool has_verb_head() const { return verb_head.output_dim() > 0; }
  bool operator==(const HoiModel&) const = default;
};

HoiModel init_model(const Taxonomy& tax, int feat_dim, const TrainConfig& cfg);
HoiModel zeros_like(const HoiModel& model);

// Two binary R x R channels (human, object) over the tight union box; a pixel
// is set when its center lies inside the box. Channel-major layout.
struct SpatialMap {
  int resolution = 0;
  std::vector<std::uint8_t> bits;

  std::uint8_t at(int channel, int row, int col) const {
    return bits[(static_cast<std::size_t>(channel) * resolution + row) * resolution + col];
  }
  std::size_t channel_sum(int channel) const;
};

SpatialMap make_spatial_pattern(const Box& human, const Box& object, int resolution = 64);

std::vector<double> spatial_input(const SpatialMap& map, std::span<const double> human_feat);
std::vector<double> interaction_input(std::span<const double> verb_feat,
                                      std::span<const double> object_feat);

struct VerbItem {
  std::vector<double> feat;
  Label verbs;  // multi-hot, length N_v
};

struct ObjectItem {
  std::vector<double> feat;
  Label objects;  // one-hot, length N_o
};

struct Composite {
  std::vector<double> input;  // verb_feat ++ object_feat
  Label label;
  int verb_item = 0;
  int object_item = 0;
};

// Labels every verb x object candidate with compose_label, drops all-zero
// labels, then keeps a uniform subset of at most cap survivors in candidate
// order.
std::vector<Composite> compose_batch(std::span<const VerbItem> verbs,
                                     std::span<const ObjectItem> objects,
                                     const Taxonomy& tax, std::size_t cap, Rng& rng);

double total_loss(double sp_loss, double hoi_loss, double atl_loss,
                  const TrainConfig& cfg);

// One training example with its classifier inputs precomputed.
struct PreparedExample {
  std::vector<double> spatial;
  std::vector<double> interaction;
  Label label;
  Label verbs;
};

PreparedExample prepare_example(const HoiInstance& inst, const Taxonomy& tax,
                                int spatial_resolution);

struct StepLosses {
  double sp = 0.0;
  double hoi = 0.0;
  double atl = 0.0;
  double aux = 0.0;
  double total = 0.0;
};

struct StepResult {
  StepLosses losses;
  HoiModel grads;
  std::uint64_t relu_pattern = 0;
  std::size_t composite_forward_calls = 0;
};

// Losses and exact gradients of the total objective for a fixed batch.
StepResult compute_step(const HoiModel& model,
                        std::span<const PreparedExample* const> batch,
                        std::span<const Composite> composites,
                        const TrainConfig& cfg);

// Central-difference check of compute_step's gradient over every parameter
// of every branch; coordinates whose probe flips a ReLU are skipped.
GradReport check_step_gradient(const HoiModel& model,
                               std::span<const PreparedExample* const> batch,
                               std::span<const Composite> composites,
                               const TrainConfig& cfg, double step = 1e-5);

struct LossRecord {
  std::int64_t step = 0;
  double sp = 0.0;
  double hoi = 0.0;
  double atl = 0.0;
  double total = 0.0;
};

struct TrainResult {
  HoiModel model;
  std::vector<LossRecord> trace;
  std::size_t composite_forward_calls = 0;
};

// Throws DivergenceError with the step index on a non-finite loss.
TrainResult train(std::span<const HoiInstance> train_set,
                  std::span<const ObjectInstance> external, const Taxonomy& tax,
                  const TrainConfig& cfg);

// s_h * s_o * s_hoi^c * s_sp^c for every category c.
std::vector<double> predict_pair(std::span<const double> human_feat,
                                 std::span<const double> verb_feat,
                                 std::span<const double> object_feat, const Box& human,
                                 const Box& object, double s_h, double s_o,
                                 const HoiModel& model, const Taxonomy& tax);

}  // namespace atl
