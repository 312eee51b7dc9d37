// Copyright 2026 The ATL Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

// End-to-end runs: world -> split -> data -> Baseline and ATL training ->
// zero-shot mAP and affordance metrics. Shared by the CLI and the acceptance
// suite.

#include <cstdint>
#include <optional>
#include <span>
#include <utility>
#include <vector>

#include "atl/affordance.hpp"
#include "atl/evalkit.hpp"
#include "atl/pipeline.hpp"
#include "atl/split.hpp"
#include "atl/synthgen.hpp"

namespace atl {

struct PredictOptions {
  double human_score = 1.0;   // s_h
  double object_score = 1.0;  // s_o
  // Std. dev. of box-corner noise applied to predicted boxes, relative to
  // the box size; 0 reproduces ground-truth boxes.
  double box_jitter = 0.0;
  std::uint64_t seed = 0;
};

// One prediction per (test instance, category); image id = instance index.
std::vector<Detection> predict_test_set(const HoiModel& model, const Taxonomy& tax,
                                        std::span<const HoiInstance> test,
                                        const PredictOptions& options = {});

std::vector<GroundTruth> ground_truth_of(std::span<const HoiInstance> test);

struct AffordanceEval {
  std::vector<int> objects;  // object label of each query
  std::vector<AffordanceScores> scores;
  std::vector<std::vector<int>> truth;
  AffordancePrf1 prf1;
  std::optional<double> map;
};

AffordanceEval evaluate_affordance(const HoiModel& model, const AffordanceBank& bank,
                                   const Taxonomy& tax,
                                   std::span<const ObjectInstance> queries,
                                   double hoi_threshold = kDefaultHoiThreshold,
                                   double keep_threshold = kDefaultKeepThreshold);

// Fresh external-domain instances of the given objects, independent of the
// training streams.
std::vector<ObjectInstance> sample_queries(const WorldSpec& world, const Taxonomy& tax,
                                           std::span<const int> objects, int per_object,
                                           std::uint64_t seed);

// Desk-scale defaults used by reproduce-trends and the acceptance suite.
TrainConfig desk_train_config();

struct TrendConfig {
  WorldParams world;
  DatasetSizes sizes;
  TrainConfig train = desk_train_config();
  double novel_fraction = 0.2;
  int bank_cap = kDefaultBankCap;
  int queries_per_object = 25;
  double hoi_threshold = kDefaultHoiThreshold;
  double keep_threshold = kDefaultKeepThreshold;
  // Extra bank caps at which the ATL model's affordance mAP is recomputed.
  std::vector<int> bank_sweep;
};

struct ModelMetrics {
  double full_map = 0.0;
  double unseen_map = 0.0;
  double seen_map = 0.0;
  double rare_map = 0.0;
  double nonrare_map = 0.0;
  Prf1 affordance_micro;
  double affordance_map = 0.0;
};

struct TrendRow {
  std::uint64_t seed = 0;
  std::vector<int> novel_objects;
  ModelMetrics baseline;
  ModelMetrics atl;
  std::vector<std::pair<int, double>> atl_bank_sweep;  // (M, affordance mAP)
};

// The Baseline is the same run with lambda2 = 0 and no external objects.
TrainConfig baseline_of(const TrainConfig& cfg);

TrendRow run_trend_seed(const TrendConfig& cfg, std::uint64_t seed);

double median(std::vector<double> values);

// Finite-difference check of the full training objective on a miniature
// pipeline (feature dim 4, hidden width 8, 6 categories) with every branch
// active: a 4-example batch plus composites from 6 external objects.
struct MiniatureGradCheck {
  GradReport report;
  std::size_t composites = 0;
};
MiniatureGradCheck miniature_grad_check(std::uint64_t seed, double step = 1e-5);

}  // namespace atl
