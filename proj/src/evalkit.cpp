// Copyright 2026 The ATL Authors
// SPDX-License-Identifier: Apache-2.0

#include "atl/evalkit.hpp"

#include <algorithm>
#include <map>
#include <numeric>
#include <stdexcept>
#include <utility>

namespace atl {
namespace {

double mean_of(const std::vector<double>& v) {
  if (v.empty()) return 0.0;
  return std::accumulate(v.begin(), v.end(), 0.0) / static_cast<double>(v.size());
}

Prf1 make_prf1(std::int64_t tp, std::int64_t predicted, std::int64_t actual) {
  Prf1 r;
  r.precision_undefined = predicted == 0;
  r.precision = predicted ? static_cast<double>(tp) / static_cast<double>(predicted) : 0.0;
  r.recall = actual ? static_cast<double>(tp) / static_cast<double>(actual) : 0.0;
  const double s = r.precision + r.recall;
  r.f1 = s > 0.0 ? 2.0 * r.precision * r.recall / s : 0.0;
  return r;
}

std::vector<int> sorted_unique(std::vector<int> v) {
  std::sort(v.begin(), v.end());
  v.erase(std::unique(v.begin(), v.end()), v.end());
  return v;
}

}  // namespace

double iou(const Box& a, const Box& b) {
  const double iw = std::min(a.x2, b.x2) - std::max(a.x1, b.x1);
  const double ih = std::min(a.y2, b.y2) - std::max(a.y1, b.y1);
  if (iw <= 0.0 || ih <= 0.0) return 0.0;
  const double inter = iw * ih;
  const double uni = a.area() + b.area() - inter;
  return uni > 0.0 ? std::clamp(inter / uni, 0.0, 1.0) : 0.0;
}

std::vector<std::uint8_t> match_detections(std::span<const Detection> predictions,
                                           std::span<const GroundTruth> ground_truth,
                                           double iou_threshold) {
  std::map<std::pair<std::int64_t, int>, std::vector<std::size_t>> by_key;
  for (std::size_t g = 0; g < ground_truth.size(); ++g) {
    by_key[{ground_truth[g].image_id, ground_truth[g].category}].push_back(g);
  }
  std::vector<std::uint8_t> claimed(ground_truth.size(), 0);
  std::vector<std::uint8_t> tp(predictions.size(), 0);
  for (std::size_t p = 0; p < predictions.size(); ++p) {
    const Detection& d = predictions[p];
    const auto it = by_key.find({d.image_id, d.category});
    if (it == by_key.end()) continue;
    double best = -1.0;
    std::size_t best_g = 0;
    for (const std::size_t g : it->second) {
      if (claimed[g]) continue;
      const double ih = iou(d.human, ground_truth[g].human);
      const double io = iou(d.object, ground_truth[g].object);
      if (ih < iou_threshold || io < iou_threshold) continue;
      const double overlap = std::min(ih, io);
      if (overlap > best) {
        best = overlap;
        best_g = g;
      }
    }
    if (best >= 0.0) {
      claimed[best_g] = 1;
      tp[p] = 1;
    }
  }
  return tp;
}

std::vector<Detection> rank_detections(std::vector<Detection> predictions) {
  std::stable_sort(predictions.begin(), predictions.end(),
                   [](const Detection& a, const Detection& b) { return a.score > b.score; });
  return predictions;
}

double average_precision(std::span<const std::uint8_t> tp_in_rank_order,
                         std::int64_t n_positives) {
  if (n_positives <= 0) return 0.0;
  double sum = 0.0;
  std::int64_t hits = 0;
  for (std::size_t k = 0; k < tp_in_rank_order.size(); ++k) {
    if (!tp_in_rank_order[k]) continue;
    ++hits;
    sum += static_cast<double>(hits) / static_cast<double>(k + 1);
  }
  if (hits > n_positives) {
    throw std::invalid_argument("average_precision: more true positives than positives");
  }
  return sum / static_cast<double>(n_positives);
}

const GroupMean& EvalReport::group(const std::string& name) const {
  for (const auto& g : groups) {
    if (g.name == name) return g;
  }
  throw std::out_of_range("report has no group '" + name + "'");
}

bool EvalReport::has_group(const std::string& name) const {
  return std::any_of(groups.begin(), groups.end(),
                     [&](const GroupMean& g) { return g.name == name; });
}

EvalReport map_report(std::span<const Detection> predictions,
                      std::span<const GroundTruth> ground_truth, const Taxonomy& tax,
                      const SplitSpec& split, std::int64_t rare_threshold) {
  const int num_cat = tax.num_categories();
  std::vector<std::vector<Detection>> preds(num_cat);
  for (const Detection& d : predictions) {
    if (d.category < 0 || d.category >= num_cat) {
      throw std::out_of_range("map_report: prediction category out of range");
    }
    preds[d.category].push_back(d);
  }
  std::vector<std::vector<GroundTruth>> gts(num_cat);
  for (const GroundTruth& g : ground_truth) {
    if (g.category < 0 || g.category >= num_cat) {
      throw std::out_of_range("map_report: ground-truth category out of range");
    }
    gts[g.category].push_back(g);
  }

  EvalReport report;
  report.split_mode = split.mode;
  report.rare_threshold = rare_threshold;
  report.category_ap.assign(num_cat, std::nullopt);
  report.category_positives.assign(num_cat, 0);
  for (int c = 0; c < num_cat; ++c) {
    report.category_positives[c] = static_cast<std::int64_t>(gts[c].size());
    if (gts[c].empty()) continue;
    const auto ranked = rank_detections(std::move(preds[c]));
    const auto tp = match_detections(ranked, gts[c]);
    report.category_ap[c] = average_precision(tp, static_cast<std::int64_t>(gts[c].size()));
  }

  std::vector<double> full, rare, nonrare, unseen, seen;
  for (int c = 0; c < num_cat; ++c) {
    if (!report.category_ap[c]) continue;
    const double ap = *report.category_ap[c];
    full.push_back(ap);
    (tax.train_counts()[c] < rare_threshold ? rare : nonrare).push_back(ap);
    if (split.mode != SplitMode::kNone) (split.is_unseen(c) ? unseen : seen).push_back(ap);
  }
  const auto add = [&](const char* name, const std::vector<double>& v) {
    report.groups.push_back({name, mean_of(v), static_cast<int>(v.size())});
  };
  add("Full", full);
  add("Rare", rare);
  add("NonRare", nonrare);
  if (split.mode != SplitMode::kNone) {
    add("Unseen", unseen);
    add("Seen", seen);
  }
  return report;
}

AffordancePrf1 affordance_prf1(std::span<const std::vector<int>> predicted,
                               std::span<const std::vector<int>> truth) {
  if (predicted.size() != truth.size()) {
    throw std::invalid_argument("affordance_prf1: predicted and truth sizes differ");
  }
  std::int64_t tp = 0, n_pred = 0, n_true = 0;
  double sum_p = 0.0, sum_r = 0.0, sum_f = 0.0;
  for (std::size_t i = 0; i < predicted.size(); ++i) {
    const auto p = sorted_unique(predicted[i]);
    const auto t = sorted_unique(truth[i]);
    std::vector<int> both;
    std::set_intersection(p.begin(), p.end(), t.begin(), t.end(), std::back_inserter(both));
    const auto hit = static_cast<std::int64_t>(both.size());
    tp += hit;
    n_pred += static_cast<std::int64_t>(p.size());
    n_true += static_cast<std::int64_t>(t.size());
    const Prf1 one = make_prf1(hit, static_cast<std::int64_t>(p.size()),
                               static_cast<std::int64_t>(t.size()));
    sum_p += one.precision;
    sum_r += one.recall;
    sum_f += one.f1;
  }
  AffordancePrf1 out;
  out.micro = make_prf1(tp, n_pred, n_true);
  if (!predicted.empty()) {
    const double n = static_cast<double>(predicted.size());
    out.macro.precision = sum_p / n;
    out.macro.recall = sum_r / n;
    out.macro.f1 = sum_f / n;
  }
  out.macro.precision_undefined = out.micro.precision_undefined;
  return out;
}

std::optional<double> affordance_map(std::span<const std::vector<std::optional<double>>> scores,
                                     std::span<const std::vector<int>> truth, int num_verbs) {
  if (scores.size() != truth.size()) {
    throw std::invalid_argument("affordance_map: scores and truth sizes differ");
  }
  std::vector<double> aps;
  for (int v = 0; v < num_verbs; ++v) {
    std::vector<std::pair<double, std::uint8_t>> ranked;
    std::int64_t positives = 0;
    for (std::size_t i = 0; i < scores.size(); ++i) {
      if (scores[i].size() != static_cast<std::size_t>(num_verbs)) {
        throw std::invalid_argument("affordance_map: per-object score length mismatch");
      }
      if (!scores[i][v]) continue;
      const bool positive = std::find(truth[i].begin(), truth[i].end(), v) != truth[i].end();
      positives += positive;
      ranked.emplace_back(*scores[i][v], positive ? 1 : 0);
    }
    if (positives == 0) continue;
    std::stable_sort(ranked.begin(), ranked.end(),
                     [](const auto& a, const auto& b) { return a.first > b.first; });
    std::vector<std::uint8_t> tp;
    tp.reserve(ranked.size());
    for (const auto& r : ranked) tp.push_back(r.second);
    aps.push_back(average_precision(tp, positives));
  }
  if (aps.empty()) return std::nullopt;
  return mean_of(aps);
}

}  // namespace atl
