// Copyright 2026 The ATL Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

// HOI detection mAP and affordance metrics.
//
// A detection is a true positive when both its human and object boxes reach
// IoU >= 0.5 with an unclaimed ground-truth pair of the same category in the
// same image. Predictions are consumed in descending score order; ties keep
// input order. AP is the non-interpolated form
//   AP = (1 / n_pos) * sum over TP ranks k of precision@k.

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "atl/box.hpp"
#include "atl/split.hpp"
#include "atl/taxonomy.hpp"

namespace atl {

inline constexpr double kIouThreshold = 0.5;
inline constexpr std::int64_t kRareThreshold = 10;

double iou(const Box& a, const Box& b);

struct Detection {
  std::int64_t image_id = 0;
  Box human;
  Box object;
  int category = 0;
  double score = 0.0;
};

struct GroundTruth {
  std::int64_t image_id = 0;
  Box human;
  Box object;
  int category = 0;
};

// predictions must already be in rank order. Returns one flag per prediction.
std::vector<std::uint8_t> match_detections(std::span<const Detection> predictions,
                                           std::span<const GroundTruth> ground_truth,
                                           double iou_threshold = kIouThreshold);

// Stable descending sort by score.
std::vector<Detection> rank_detections(std::vector<Detection> predictions);

// Returns 0 when n_positives is 0.
double average_precision(std::span<const std::uint8_t> tp_in_rank_order,
                         std::int64_t n_positives);

struct GroupMean {
  std::string name;
  double mean_ap = 0.0;
  int categories = 0;
};

struct EvalReport {
  // nullopt for categories with no ground truth; those are excluded from
  // every group mean.
  std::vector<std::optional<double>> category_ap;
  std::vector<std::int64_t> category_positives;
  std::vector<GroupMean> groups;  // Full, Rare, NonRare, then Unseen, Seen
  SplitMode split_mode = SplitMode::kNone;
  std::int64_t rare_threshold = kRareThreshold;

  const GroupMean& group(const std::string& name) const;
  bool has_group(const std::string& name) const;
};

// Rare categories have train_counts below rare_threshold. Unseen/Seen groups
// are added when split.mode is not none.
EvalReport map_report(std::span<const Detection> predictions,
                      std::span<const GroundTruth> ground_truth, const Taxonomy& tax,
                      const SplitSpec& split, std::int64_t rare_threshold = kRareThreshold);

struct Prf1 {
  double precision = 0.0;
  double recall = 0.0;
  double f1 = 0.0;
  // Set when there were no positive predictions (precision reported as 0).
  bool precision_undefined = false;
};

struct AffordancePrf1 {
  Prf1 micro;
  Prf1 macro;  // mean over objects of per-object P, R, F1
};

// Each set is a list of verb ids. predicted and truth are parallel per object.
AffordancePrf1 affordance_prf1(std::span<const std::vector<int>> predicted,
                               std::span<const std::vector<int>> truth);

// scores[object][verb]: nullopt when undefined (verb not in the bank).
// Per verb, objects with a defined score are ranked and scored with AP;
// verbs with no positive object or no defined score are excluded.
// Returns nullopt when every verb is excluded.
std::optional<double> affordance_map(
    std::span<const std::vector<std::optional<double>>> scores,
    std::span<const std::vector<int>> truth, int num_verbs);

}  // namespace atl
