// Copyright 2026 The ATL Authors
// SPDX-License-Identifier: Apache-2.0

#include "atl/affordance.hpp"

#include <algorithm>
#include <numeric>
#include <stdexcept>

namespace atl {

bool AffordanceBank::empty() const {
  return std::all_of(entries.begin(), entries.end(),
                     [](const auto& e) { return e.empty(); });
}

void validate(const AffordanceBank& bank, const Taxonomy& tax) {
  if (bank.cap < 1) throw std::invalid_argument("bank: cap M must be >= 1");
  if (bank.entries.size() != static_cast<std::size_t>(tax.num_verbs())) {
    throw std::invalid_argument("bank: one entry list per verb required");
  }
  for (const auto& list : bank.entries) {
    if (list.size() > static_cast<std::size_t>(bank.cap)) {
      throw std::invalid_argument("bank: verb holds more than M entries");
    }
    for (const auto& f : list) {
      if (f.size() != static_cast<std::size_t>(bank.feat_dim)) {
        throw std::invalid_argument("bank: feature dimension mismatch");
      }
    }
  }
}

AffordanceBank build_bank(std::span<const HoiInstance> train_set, const Taxonomy& tax,
                          int cap, std::uint64_t seed) {
  if (cap < 1) throw std::invalid_argument("build_bank: M must be >= 1");
  AffordanceBank bank;
  bank.cap = cap;
  bank.source_seed = seed;
  bank.entries.resize(tax.num_verbs());
  bank.feat_dim = train_set.empty() ? 0 : static_cast<int>(train_set.front().verb_feat.size());

  std::vector<std::vector<std::size_t>> holders(tax.num_verbs());
  for (std::size_t i = 0; i < train_set.size(); ++i) {
    const Label verbs = decouple_verb(train_set[i].hoi_label, tax);
    for (int v = 0; v < tax.num_verbs(); ++v) {
      if (verbs[v] && !tax.is_no_interaction(v)) holders[v].push_back(i);
    }
  }
  const std::uint64_t stream = stream_seed(seed, "bank");
  for (int v = 0; v < tax.num_verbs(); ++v) {
    auto& idx = holders[v];
    if (idx.size() > static_cast<std::size_t>(cap)) {
      Rng rng(item_seed(stream, static_cast<std::uint64_t>(v)));
      std::shuffle(idx.begin(), idx.end(), rng);
      idx.resize(static_cast<std::size_t>(cap));
      std::sort(idx.begin(), idx.end());
    }
    for (const std::size_t i : idx) bank.entries[v].push_back(train_set[i].verb_feat);
  }
  return bank;
}

std::vector<double> verb_scores(std::span<const double> hoi_probs, const Taxonomy& tax) {
  if (hoi_probs.size() != static_cast<std::size_t>(tax.num_categories())) {
    throw std::invalid_argument("verb_scores: score vector length mismatch");
  }
  std::vector<double> out(tax.num_verbs(), 0.0);
  for (int c = 0; c < tax.num_categories(); ++c) {
    double& s = out[tax.pair(c).verb];
    s = std::max(s, hoi_probs[c]);
  }
  return out;
}

AffordanceScores recognize(std::span<const double> object_feat, const AffordanceBank& bank,
                           const HoiModel& model, const Taxonomy& tax, double hoi_threshold,
                           double keep_threshold) {
  validate(bank, tax);
  if (bank.empty()) throw std::invalid_argument("recognize: affordance bank is empty");
  if (!(hoi_threshold >= 0.0 && hoi_threshold <= 1.0) ||
      !(keep_threshold >= 0.0 && keep_threshold <= 1.0)) {
    throw std::invalid_argument("recognize: thresholds must be in [0, 1]");
  }
  if (object_feat.size() != static_cast<std::size_t>(bank.feat_dim) ||
      model.interaction.input_dim() != 2 * object_feat.size()) {
    throw std::invalid_argument("recognize: object feature dimension mismatch");
  }
  AffordanceScores out;
  const int nv = tax.num_verbs();
  out.hits.assign(nv, 0);
  out.bank_counts.assign(nv, 0);
  out.score.assign(nv, std::nullopt);
  for (int v = 0; v < nv; ++v) {
    const auto& list = bank.entries[v];
    out.bank_counts[v] = static_cast<std::int64_t>(list.size());
    for (const auto& feat : list) {
      const MLPForward f = mlp_forward(model.interaction, interaction_input(feat, object_feat));
      // Predictions for verbs other than the entry's own are discarded.
      double best = 0.0;
      for (const int c : tax.categories_of_verb(v)) best = std::max(best, f.probs[c]);
      if (best >= hoi_threshold) ++out.hits[v];
    }
    if (!list.empty()) {
      const double p = static_cast<double>(out.hits[v]) / static_cast<double>(list.size());
      out.score[v] = p;
      if (p > keep_threshold) out.kept.push_back(v);
    }
  }
  return out;
}

}  // namespace atl
