// Copyright 2026 The ATL Authors
// SPDX-License-Identifier: Apache-2.0

#include "atl/taxonomy.hpp"

#include <algorithm>
#include <stdexcept>
#include <string>

namespace atl {
namespace {

std::string pair_string(const HoiPair& p) {
  return "(" + std::to_string(p.verb) + ", " + std::to_string(p.object) + ")";
}

void check_binary(std::span<const std::uint8_t> v, const char* what) {
  for (const auto b : v) {
    if (b > 1) throw std::invalid_argument(std::string(what) + ": entries must be 0 or 1");
  }
}

// Thresholded vector-matrix product: out[c] = 1 iff sum_r label[r] * m[r][c] > 0.
Label threshold_product(std::span<const std::uint8_t> label, const BinaryMatrix& m) {
  std::vector<int> acc(m.cols, 0);
  for (std::size_t r = 0; r < m.rows; ++r) {
    if (!label[r]) continue;
    const auto row = m.row(r);
    for (std::size_t c = 0; c < m.cols; ++c) acc[c] += row[c];
  }
  Label out(m.cols, 0);
  for (std::size_t c = 0; c < m.cols; ++c) out[c] = acc[c] > 0 ? 1 : 0;
  return out;
}

// y . M^T thresholded.
Label threshold_product_t(std::span<const std::uint8_t> y, const BinaryMatrix& m) {
  Label out(m.rows, 0);
  for (std::size_t r = 0; r < m.rows; ++r) {
    const auto row = m.row(r);
    for (std::size_t c = 0; c < m.cols; ++c) {
      if (y[c] && row[c]) {
        out[r] = 1;
        break;
      }
    }
  }
  return out;
}

}  // namespace

CooccurrenceMatrices build_cooccurrence(std::span<const HoiPair> pairs,
                                        int num_verbs, int num_objects) {
  if (num_verbs < 1 || num_objects < 1) {
    throw std::invalid_argument("taxonomy needs at least one verb and one object");
  }
  if (pairs.empty()) throw std::invalid_argument("taxonomy needs at least one HOI pair");
  CooccurrenceMatrices m{BinaryMatrix(num_verbs, pairs.size()),
                         BinaryMatrix(num_objects, pairs.size())};
  std::vector<std::uint8_t> seen(static_cast<std::size_t>(num_verbs) * num_objects, 0);
  for (std::size_t c = 0; c < pairs.size(); ++c) {
    const HoiPair& p = pairs[c];
    if (p.verb < 0 || p.verb >= num_verbs || p.object < 0 || p.object >= num_objects) {
      throw std::out_of_range("HOI pair " + pair_string(p) + " at index " +
                              std::to_string(c) + " is out of range");
    }
    auto& flag = seen[static_cast<std::size_t>(p.verb) * num_objects + p.object];
    if (flag) {
      throw std::invalid_argument("duplicate HOI pair " + pair_string(p) +
                                  " at index " + std::to_string(c));
    }
    flag = 1;
    m.verb_hoi.at(p.verb, c) = 1;
    m.object_hoi.at(p.object, c) = 1;
  }
  return m;
}

Taxonomy::Taxonomy(std::vector<std::string> verb_names,
                   std::vector<std::string> object_names, std::vector<HoiPair> pairs,
                   std::vector<std::int64_t> train_counts,
                   std::vector<bool> no_interaction)
    : verb_names_(std::move(verb_names)),
      object_names_(std::move(object_names)),
      pairs_(std::move(pairs)),
      train_counts_(std::move(train_counts)),
      no_interaction_(std::move(no_interaction)) {
  matrices_ = build_cooccurrence(pairs_, num_verbs(), num_objects());
  if (train_counts_.empty()) train_counts_.assign(pairs_.size(), 0);
  if (train_counts_.size() != pairs_.size()) {
    throw std::invalid_argument("train_counts must have one entry per HOI category");
  }
  for (const auto c : train_counts_) {
    if (c < 0) throw std::invalid_argument("train_counts must be nonnegative");
  }
  if (no_interaction_.empty()) no_interaction_.assign(verb_names_.size(), false);
  if (no_interaction_.size() != verb_names_.size()) {
    throw std::invalid_argument("no_interaction must have one flag per verb");
  }
  pair_index_.assign(static_cast<std::size_t>(num_verbs()) * num_objects(), -1);
  verb_categories_.resize(num_verbs());
  object_categories_.resize(num_objects());
  for (int c = 0; c < num_categories(); ++c) {
    const HoiPair& p = pairs_[c];
    pair_index_[static_cast<std::size_t>(p.verb) * num_objects() + p.object] = c;
    verb_categories_[p.verb].push_back(c);
    object_categories_[p.object].push_back(c);
  }
}

bool Taxonomy::is_valid_pair(int verb, int object) const {
  return category_of(verb, object).has_value();
}

std::optional<int> Taxonomy::category_of(int verb, int object) const {
  if (verb < 0 || verb >= num_verbs() || object < 0 || object >= num_objects()) {
    throw std::out_of_range("verb/object id out of range: " +
                            pair_string({verb, object}));
  }
  const int c = pair_index_[static_cast<std::size_t>(verb) * num_objects() + object];
  if (c < 0) return std::nullopt;
  return c;
}

std::vector<int> Taxonomy::affordances_of(int object) const {
  std::vector<int> verbs;
  for (const int c : categories_of_object(object)) {
    const int v = pairs_[c].verb;
    if (!no_interaction_[v]) verbs.push_back(v);
  }
  std::sort(verbs.begin(), verbs.end());
  return verbs;
}

Taxonomy Taxonomy::with_train_counts(std::vector<std::int64_t> counts) const {
  return Taxonomy(verb_names_, object_names_, pairs_, std::move(counts),
                  no_interaction_);
}

int Taxonomy::find_verb(const std::string& name) const {
  for (int v = 0; v < num_verbs(); ++v) {
    if (verb_names_[v] == name) return v;
  }
  throw std::out_of_range("unknown verb '" + name + "'");
}

int Taxonomy::find_object(const std::string& name) const {
  for (int o = 0; o < num_objects(); ++o) {
    if (object_names_[o] == name) return o;
  }
  throw std::out_of_range("unknown object '" + name + "'");
}

Label one_hot(int index, int length) {
  if (index < 0 || index >= length) throw std::out_of_range("one_hot: index out of range");
  Label l(length, 0);
  l[index] = 1;
  return l;
}

Label compose_label(std::span<const std::uint8_t> object_label,
                    std::span<const std::uint8_t> verb_label, const Taxonomy& tax) {
  if (object_label.size() != static_cast<std::size_t>(tax.num_objects()) ||
      verb_label.size() != static_cast<std::size_t>(tax.num_verbs())) {
    throw std::invalid_argument("compose_label: label length does not match taxonomy");
  }
  check_binary(object_label, "compose_label");
  check_binary(verb_label, "compose_label");
  Label by_object = threshold_product(object_label, tax.object_hoi());
  const Label by_verb = threshold_product(verb_label, tax.verb_hoi());
  for (std::size_t c = 0; c < by_object.size(); ++c) by_object[c] &= by_verb[c];
  return by_object;
}

Label decouple_verb(std::span<const std::uint8_t> hoi_label, const Taxonomy& tax) {
  if (hoi_label.size() != static_cast<std::size_t>(tax.num_categories())) {
    throw std::invalid_argument("decouple_verb: label length does not match taxonomy");
  }
  check_binary(hoi_label, "decouple_verb");
  return threshold_product_t(hoi_label, tax.verb_hoi());
}

Label decouple_object(std::span<const std::uint8_t> hoi_label, const Taxonomy& tax) {
  if (hoi_label.size() != static_cast<std::size_t>(tax.num_categories())) {
    throw std::invalid_argument("decouple_object: label length does not match taxonomy");
  }
  check_binary(hoi_label, "decouple_object");
  return threshold_product_t(hoi_label, tax.object_hoi());
}

bool is_valid_pair(int verb, int object, const Taxonomy& tax) {
  return tax.is_valid_pair(verb, object);
}

}  // namespace atl
