// Copyright 2026 The ATL Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

// Synthetic HOI worlds.
//
// Each verb and object owns a latent prototype vector. An HOI instance of
// category (v, o) carries verb_feat = proto_v + noise, object_feat =
// proto_o + noise and a human feature built from the active verbs. A second
// stream of bare object instances plays the external object dataset; its
// features carry a fixed domain offset.

#include <array>
#include <cstdint>
#include <string>
#include <vector>

#include "atl/box.hpp"
#include "atl/rng.hpp"
#include "atl/split.hpp"
#include "atl/taxonomy.hpp"

namespace atl {

struct WorldParams {
  int num_verbs = 12;
  int num_objects = 20;
  int num_pairs = 60;
  int feat_dim = 16;
  double noise_sigma = 0.3;
  // Per-category training frequency follows k^-tail_exponent over a random
  // ranking of the categories.
  double tail_exponent = 1.25;
  // Total the nominal train_counts are allocated from.
  std::int64_t nominal_train = 4000;
  // Norm of the offset added to external-object features.
  double domain_shift = 0.3;
  // Probability that an instance also carries a second valid category with
  // the same object.
  double co_label_prob = 0.1;
  // Number of verbs flagged as "no interaction" (taken from the end).
  int num_no_interaction = 0;
  std::uint64_t seed = 1;
};

struct WorldSpec {
  int feat_dim = 0;
  std::vector<std::vector<double>> verb_prototypes;
  std::vector<std::vector<double>> object_prototypes;
  // Object-box center offset per verb, in units of the human box size.
  std::vector<std::array<double, 2>> verb_offsets;
  double noise_sigma = 0.0;
  double tail_exponent = 0.0;
  std::vector<double> object_domain_shift;
  double co_label_prob = 0.0;
  std::uint64_t seed = 0;
};

struct World {
  Taxonomy taxonomy;
  WorldSpec spec;
  // Soft invariant violations, e.g. prototypes closer than 4 sigma.
  std::vector<std::string> warnings;
};

struct HoiInstance {
  Box human_box;
  Box object_box;
  int object_label = 0;
  Label hoi_label;
  std::vector<double> human_feat;
  std::vector<double> verb_feat;
  std::vector<double> object_feat;
};

struct ObjectInstance {
  Box object_box;
  int object_label = 0;
  std::vector<double> object_feat;
};

// Rejects num_pairs > N_v * N_o and feat_dim < 2.
World gen_world(const WorldParams& params);

// Largest-remainder allocation of total over weights; sums to total exactly.
std::vector<std::int64_t> allocate_counts(std::int64_t total,
                                          const std::vector<double>& weights);

// allowed_co_labels, when non-empty, restricts the optional co-label to
// categories whose flag is set.
HoiInstance sample_hoi_instance(const WorldSpec& world, const Taxonomy& tax,
                                int category, Rng& rng,
                                const std::vector<std::uint8_t>& allowed_co_labels = {});

ObjectInstance sample_object_instance(const WorldSpec& world, const Taxonomy& tax,
                                      int object, Rng& rng);

struct DatasetSizes {
  std::int64_t n_train = 4000;
  std::int64_t n_test = 1000;
  std::int64_t n_external = 2000;
};

struct Dataset {
  std::vector<HoiInstance> train;
  std::vector<HoiInstance> test;
  std::vector<ObjectInstance> external;
  // Input taxonomy with train_counts replaced by the realized counts.
  Taxonomy taxonomy;
};

// Training instances come from seen categories only, allocated in
// proportion to the taxonomy's nominal train_counts; the test set cycles
// through all categories; external objects are uniform over all objects.
// Item i of each stream is drawn from its own generator seeded with
// item_seed(stream_seed(seed, stream), i).
Dataset gen_dataset(const WorldSpec& world, const Taxonomy& tax,
                    const SplitSpec& split, const DatasetSizes& sizes,
                    std::uint64_t seed);

void check_instance(const HoiInstance& inst, const Taxonomy& tax, int feat_dim);

}  // namespace atl
