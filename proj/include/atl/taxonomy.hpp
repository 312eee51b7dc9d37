// Copyright 2026 The ATL Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

namespace atl {

// Multi-hot binary vector; one-hot is the special case.
using Label = std::vector<std::uint8_t>;

struct HoiPair {
  int verb = 0;
  int object = 0;
  bool operator==(const HoiPair&) const = default;
};

// Dense row-major {0,1} matrix.
struct BinaryMatrix {
  std::size_t rows = 0;
  std::size_t cols = 0;
  std::vector<std::uint8_t> bits;

  BinaryMatrix() = default;
  BinaryMatrix(std::size_t r, std::size_t c) : rows(r), cols(c), bits(r * c, 0) {}

  std::uint8_t at(std::size_t r, std::size_t c) const { return bits[r * cols + c]; }
  std::uint8_t& at(std::size_t r, std::size_t c) { return bits[r * cols + c]; }
  std::span<const std::uint8_t> row(std::size_t r) const {
    return {bits.data() + r * cols, cols};
  }
};

struct CooccurrenceMatrices {
  BinaryMatrix verb_hoi;    // A_v, N_v x C
  BinaryMatrix object_hoi;  // A_o, N_o x C
};

// Rejects duplicate pairs (naming the pair) and out-of-range ids.
CooccurrenceMatrices build_cooccurrence(std::span<const HoiPair> pairs,
                                        int num_verbs, int num_objects);

// The HOI label space: verbs, objects and the valid (verb, object) pairs.
// Immutable once built; every constructor path validates all invariants.
class Taxonomy {
 public:
  Taxonomy(std::vector<std::string> verb_names,
           std::vector<std::string> object_names, std::vector<HoiPair> pairs,
           std::vector<std::int64_t> train_counts = {},
           std::vector<bool> no_interaction = {});

  int num_verbs() const { return static_cast<int>(verb_names_.size()); }
  int num_objects() const { return static_cast<int>(object_names_.size()); }
  int num_categories() const { return static_cast<int>(pairs_.size()); }

  const std::vector<std::string>& verb_names() const { return verb_names_; }
  const std::vector<std::string>& object_names() const { return object_names_; }
  const std::vector<HoiPair>& pairs() const { return pairs_; }
  const HoiPair& pair(int category) const { return pairs_.at(category); }
  const std::vector<std::int64_t>& train_counts() const { return train_counts_; }
  const std::vector<bool>& no_interaction() const { return no_interaction_; }
  bool is_no_interaction(int verb) const { return no_interaction_.at(verb); }

  const BinaryMatrix& verb_hoi() const { return matrices_.verb_hoi; }
  const BinaryMatrix& object_hoi() const { return matrices_.object_hoi; }

  // Throws std::out_of_range on bad ids.
  bool is_valid_pair(int verb, int object) const;
  std::optional<int> category_of(int verb, int object) const;

  const std::vector<int>& categories_of_verb(int verb) const {
    return verb_categories_.at(verb);
  }
  const std::vector<int>& categories_of_object(int object) const {
    return object_categories_.at(object);
  }
  // Verbs v with (v, object) valid, excluding no-interaction verbs.
  std::vector<int> affordances_of(int object) const;

  Taxonomy with_train_counts(std::vector<std::int64_t> counts) const;

  int find_verb(const std::string& name) const;
  int find_object(const std::string& name) const;

 private:
  std::vector<std::string> verb_names_;
  std::vector<std::string> object_names_;
  std::vector<HoiPair> pairs_;
  std::vector<std::int64_t> train_counts_;
  std::vector<bool> no_interaction_;
  CooccurrenceMatrices matrices_;
  std::vector<int> pair_index_;  // num_verbs x num_objects, -1 when invalid
  std::vector<std::vector<int>> verb_categories_;
  std::vector<std::vector<int>> object_categories_;
};

Label one_hot(int index, int length);

// (obj_label . A_o) AND (verb_label . A_v), each product thresholded to {0,1}.
Label compose_label(std::span<const std::uint8_t> object_label,
                    std::span<const std::uint8_t> verb_label,
                    const Taxonomy& tax);

// y . A_v^T thresholded: bit v set iff some active category has verb v.
Label decouple_verb(std::span<const std::uint8_t> hoi_label, const Taxonomy& tax);
Label decouple_object(std::span<const std::uint8_t> hoi_label,
                      const Taxonomy& tax);

bool is_valid_pair(int verb, int object, const Taxonomy& tax);

}  // namespace atl
