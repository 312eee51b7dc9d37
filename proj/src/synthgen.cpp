// Copyright 2026 The ATL Authors
// SPDX-License-Identifier: Apache-2.0

#include "atl/synthgen.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

namespace atl {
namespace {

std::vector<double> random_vector(Rng& rng, int dim, double sigma) {
  std::vector<double> v(dim);
  for (double& x : v) x = gaussian(rng, sigma);
  return v;
}

double distance(const std::vector<double>& a, const std::vector<double>& b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += (a[i] - b[i]) * (a[i] - b[i]);
  return std::sqrt(s);
}

double min_pairwise_distance(const std::vector<std::vector<double>>& protos) {
  double best = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < protos.size(); ++i) {
    for (std::size_t j = i + 1; j < protos.size(); ++j) {
      best = std::min(best, distance(protos[i], protos[j]));
    }
  }
  return best;
}

std::vector<double> noisy(const std::vector<double>& base, double sigma, Rng& rng) {
  std::vector<double> v = base;
  for (double& x : v) x += gaussian(rng, sigma);
  return v;
}

// Pairs without replacement. When there is room, every object and then every
// verb is covered once before the remaining pairs are drawn uniformly.
std::vector<HoiPair> sample_pairs(int nv, int no, int count, Rng& rng) {
  std::vector<std::uint8_t> taken(static_cast<std::size_t>(nv) * no, 0);
  std::vector<HoiPair> pairs;
  const auto take = [&](int v, int o) {
    taken[static_cast<std::size_t>(v) * no + o] = 1;
    pairs.push_back({v, o});
  };
  if (count >= nv + no) {
    std::vector<std::uint8_t> verb_used(nv, 0);
    for (int o = 0; o < no; ++o) {
      const int v = static_cast<int>(uniform_index(rng, nv));
      take(v, o);
      verb_used[v] = 1;
    }
    for (int v = 0; v < nv; ++v) {
      if (verb_used[v]) continue;
      std::vector<int> free_objects;
      for (int o = 0; o < no; ++o) {
        if (!taken[static_cast<std::size_t>(v) * no + o]) free_objects.push_back(o);
      }
      take(v, free_objects[uniform_index(rng, free_objects.size())]);
    }
  }
  std::vector<HoiPair> rest;
  for (int v = 0; v < nv; ++v) {
    for (int o = 0; o < no; ++o) {
      if (!taken[static_cast<std::size_t>(v) * no + o]) rest.push_back({v, o});
    }
  }
  std::shuffle(rest.begin(), rest.end(), rng);
  for (std::size_t i = 0; pairs.size() < static_cast<std::size_t>(count); ++i) {
    pairs.push_back(rest[i]);
  }
  // Category ids ordered by (object, verb) for readable taxonomies.
  std::sort(pairs.begin(), pairs.end(), [](const HoiPair& a, const HoiPair& b) {
    return a.object != b.object ? a.object < b.object : a.verb < b.verb;
  });
  return pairs;
}

Box clamp_box(double cx, double cy, double w, double h) {
  constexpr double kMinSide = 0.01;
  w = std::clamp(w, kMinSide, 1.0);
  h = std::clamp(h, kMinSide, 1.0);
  cx = std::clamp(cx, w / 2, 1.0 - w / 2);
  cy = std::clamp(cy, h / 2, 1.0 - h / 2);
  return {cx - w / 2, cy - h / 2, cx + w / 2, cy + h / 2};
}

}  // namespace

std::vector<std::int64_t> allocate_counts(std::int64_t total,
                                          const std::vector<double>& weights) {
  if (total < 0) throw std::invalid_argument("allocate_counts: negative total");
  std::vector<std::int64_t> out(weights.size(), 0);
  if (weights.empty()) return out;
  double sum = 0.0;
  for (const double w : weights) {
    if (!(w >= 0.0)) throw std::invalid_argument("allocate_counts: negative weight");
    sum += w;
  }
  std::vector<double> w = weights;
  if (sum == 0.0) {
    std::fill(w.begin(), w.end(), 1.0);
    sum = static_cast<double>(w.size());
  }
  std::vector<double> remainder(w.size());
  std::int64_t assigned = 0;
  for (std::size_t i = 0; i < w.size(); ++i) {
    const double ideal = static_cast<double>(total) * w[i] / sum;
    out[i] = static_cast<std::int64_t>(std::floor(ideal));
    remainder[i] = ideal - static_cast<double>(out[i]);
    assigned += out[i];
  }
  std::vector<std::size_t> order(w.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return remainder[a] > remainder[b]; });
  for (std::size_t i = 0; assigned < total; ++i, ++assigned) ++out[order[i % order.size()]];
  return out;
}

World gen_world(const WorldParams& p) {
  if (p.num_verbs < 1 || p.num_objects < 1 || p.num_pairs < 1) {
    throw std::invalid_argument("gen_world: counts must be positive");
  }
  if (static_cast<std::int64_t>(p.num_pairs) >
      static_cast<std::int64_t>(p.num_verbs) * p.num_objects) {
    throw std::invalid_argument("gen_world: num_pairs exceeds N_v * N_o");
  }
  if (p.feat_dim < 2) throw std::invalid_argument("gen_world: feat_dim must be >= 2");
  if (p.noise_sigma < 0.0 || p.tail_exponent < 0.0 || p.domain_shift < 0.0) {
    throw std::invalid_argument("gen_world: sigma, tail exponent and shift must be >= 0");
  }
  if (p.co_label_prob < 0.0 || p.co_label_prob > 1.0) {
    throw std::invalid_argument("gen_world: co_label_prob must be in [0, 1]");
  }
  if (p.num_no_interaction < 0 || p.num_no_interaction >= p.num_verbs) {
    throw std::invalid_argument("gen_world: num_no_interaction must leave a real verb");
  }

  Rng rng = make_rng(p.seed, "world");
  const auto pairs = sample_pairs(p.num_verbs, p.num_objects, p.num_pairs, rng);

  WorldSpec spec;
  spec.feat_dim = p.feat_dim;
  spec.noise_sigma = p.noise_sigma;
  spec.tail_exponent = p.tail_exponent;
  spec.co_label_prob = p.co_label_prob;
  spec.seed = p.seed;
  for (int v = 0; v < p.num_verbs; ++v) {
    spec.verb_prototypes.push_back(random_vector(rng, p.feat_dim, 1.0));
  }
  for (int o = 0; o < p.num_objects; ++o) {
    spec.object_prototypes.push_back(random_vector(rng, p.feat_dim, 1.0));
  }
  for (int v = 0; v < p.num_verbs; ++v) {
    spec.verb_offsets.push_back({uniform(rng, -1.0, 1.0), uniform(rng, -1.0, 1.0)});
  }
  spec.object_domain_shift = random_vector(rng, p.feat_dim, 1.0);
  const double norm = std::sqrt(std::inner_product(
      spec.object_domain_shift.begin(), spec.object_domain_shift.end(),
      spec.object_domain_shift.begin(), 0.0));
  for (double& x : spec.object_domain_shift) x *= norm > 0.0 ? p.domain_shift / norm : 0.0;

  // Zipf-like nominal counts over a random ranking of the categories.
  std::vector<int> rank(p.num_pairs);
  std::iota(rank.begin(), rank.end(), 0);
  std::shuffle(rank.begin(), rank.end(), rng);
  std::vector<double> weights(p.num_pairs);
  for (int k = 0; k < p.num_pairs; ++k) {
    weights[rank[k]] = std::pow(static_cast<double>(k + 1), -p.tail_exponent);
  }
  auto counts = allocate_counts(p.nominal_train, weights);

  std::vector<std::string> verbs, objects;
  for (int v = 0; v < p.num_verbs; ++v) verbs.push_back("verb" + std::to_string(v));
  for (int o = 0; o < p.num_objects; ++o) objects.push_back("object" + std::to_string(o));
  std::vector<bool> no_interaction(p.num_verbs, false);
  for (int i = 0; i < p.num_no_interaction; ++i) {
    no_interaction[p.num_verbs - 1 - i] = true;
    verbs[p.num_verbs - 1 - i] = "no_interaction" + std::to_string(i);
  }

  World world{Taxonomy(std::move(verbs), std::move(objects), pairs, std::move(counts),
                       std::move(no_interaction)),
              std::move(spec),
              {}};
  const double threshold = 4.0 * p.noise_sigma;
  if (p.num_verbs > 1 && min_pairwise_distance(world.spec.verb_prototypes) <= threshold) {
    world.warnings.push_back("verb prototypes closer than 4 sigma");
  }
  if (p.num_objects > 1 && min_pairwise_distance(world.spec.object_prototypes) <= threshold) {
    world.warnings.push_back("object prototypes closer than 4 sigma");
  }
  return world;
}

HoiInstance sample_hoi_instance(const WorldSpec& world, const Taxonomy& tax, int category,
                                Rng& rng, const std::vector<std::uint8_t>& allowed_co_labels) {
  if (category < 0 || category >= tax.num_categories()) {
    throw std::out_of_range("sample_hoi_instance: category out of range");
  }
  const HoiPair pair = tax.pair(category);
  HoiInstance inst;
  inst.object_label = pair.object;
  inst.hoi_label = one_hot(category, tax.num_categories());

  // The co-label draw happens unconditionally so the stream layout does not
  // depend on co_label_prob.
  const double co_draw = uniform(rng, 0.0, 1.0);
  std::vector<int> partners;
  for (const int c : tax.categories_of_object(pair.object)) {
    if (c == category) continue;
    if (!allowed_co_labels.empty() && !allowed_co_labels[c]) continue;
    partners.push_back(c);
  }
  const std::size_t partner_pick = uniform_index(rng, std::max<std::size_t>(partners.size(), 1));
  if (co_draw < world.co_label_prob && !partners.empty()) {
    inst.hoi_label[partners[partner_pick]] = 1;
  }

  const double sigma = world.noise_sigma;
  inst.verb_feat = noisy(world.verb_prototypes[pair.verb], sigma, rng);
  inst.object_feat = noisy(world.object_prototypes[pair.object], sigma, rng);

  const Label verbs = decouple_verb(inst.hoi_label, tax);
  std::vector<double> human(world.feat_dim, 0.0);
  int active = 0;
  for (int v = 0; v < tax.num_verbs(); ++v) {
    if (!verbs[v]) continue;
    ++active;
    for (int d = 0; d < world.feat_dim; ++d) human[d] += world.verb_prototypes[v][d];
  }
  for (double& x : human) x /= active;
  inst.human_feat = noisy(human, sigma, rng);

  const double hcx = uniform(rng, 0.3, 0.7);
  const double hcy = uniform(rng, 0.3, 0.7);
  const double hw = uniform(rng, 0.15, 0.35);
  const double hh = uniform(rng, 0.25, 0.5);
  inst.human_box = clamp_box(hcx, hcy, hw, hh);
  const auto& offset = world.verb_offsets[pair.verb];
  const double ocx = hcx + offset[0] * hw + gaussian(rng, 0.1 * hw);
  const double ocy = hcy + offset[1] * hh + gaussian(rng, 0.1 * hh);
  const double ow = uniform(rng, 0.08, 0.3);
  const double oh = uniform(rng, 0.08, 0.3);
  inst.object_box = clamp_box(ocx, ocy, ow, oh);
  return inst;
}

ObjectInstance sample_object_instance(const WorldSpec& world, const Taxonomy& tax,
                                      int object, Rng& rng) {
  if (object < 0 || object >= tax.num_objects()) {
    throw std::out_of_range("sample_object_instance: object out of range");
  }
  ObjectInstance inst;
  inst.object_label = object;
  std::vector<double> base = world.object_prototypes[object];
  for (int d = 0; d < world.feat_dim; ++d) base[d] += world.object_domain_shift[d];
  inst.object_feat = noisy(base, world.noise_sigma, rng);
  inst.object_box = clamp_box(uniform(rng, 0.2, 0.8), uniform(rng, 0.2, 0.8),
                              uniform(rng, 0.1, 0.5), uniform(rng, 0.1, 0.5));
  return inst;
}

Dataset gen_dataset(const WorldSpec& world, const Taxonomy& tax, const SplitSpec& split,
                    const DatasetSizes& sizes, std::uint64_t seed) {
  validate_split(split, tax);
  if (split.seen_hoi_ids.empty()) {
    throw std::invalid_argument("gen_dataset: split leaves no seen categories");
  }
  if (sizes.n_train < 0 || sizes.n_test < 0 || sizes.n_external < 0) {
    throw std::invalid_argument("gen_dataset: sizes must be nonnegative");
  }
  if (static_cast<int>(world.verb_prototypes.size()) != tax.num_verbs() ||
      static_cast<int>(world.object_prototypes.size()) != tax.num_objects()) {
    throw std::invalid_argument("gen_dataset: world does not match taxonomy");
  }
  const int num_cat = tax.num_categories();
  std::vector<std::uint8_t> seen_mask(num_cat, 0);
  for (const int c : split.seen_hoi_ids) seen_mask[c] = 1;

  // Training categories: nominal weights restricted to seen categories.
  std::vector<double> weights;
  for (const int c : split.seen_hoi_ids) {
    weights.push_back(static_cast<double>(tax.train_counts()[c]));
  }
  const auto per_seen = allocate_counts(sizes.n_train, weights);
  std::vector<int> train_categories;
  for (std::size_t i = 0; i < per_seen.size(); ++i) {
    train_categories.insert(train_categories.end(), per_seen[i], split.seen_hoi_ids[i]);
  }
  Rng order_rng = make_rng(seed, "train-order");
  std::shuffle(train_categories.begin(), train_categories.end(), order_rng);

  Dataset ds{{}, {}, {}, tax};
  const std::uint64_t train_stream = stream_seed(seed, "train");
  ds.train.reserve(train_categories.size());
  for (std::size_t i = 0; i < train_categories.size(); ++i) {
    Rng rng(item_seed(train_stream, i));
    ds.train.push_back(sample_hoi_instance(world, tax, train_categories[i], rng, seen_mask));
  }

  const std::uint64_t test_stream = stream_seed(seed, "test");
  std::vector<int> test_categories;
  for (std::int64_t i = 0; i < sizes.n_test; ++i) {
    test_categories.push_back(static_cast<int>(i % num_cat));
  }
  Rng test_order = make_rng(seed, "test-order");
  std::shuffle(test_categories.begin(), test_categories.end(), test_order);
  for (std::size_t i = 0; i < test_categories.size(); ++i) {
    Rng rng(item_seed(test_stream, i));
    ds.test.push_back(sample_hoi_instance(world, tax, test_categories[i], rng));
  }

  const std::uint64_t ext_stream = stream_seed(seed, "external");
  for (std::int64_t i = 0; i < sizes.n_external; ++i) {
    Rng rng(item_seed(ext_stream, static_cast<std::uint64_t>(i)));
    const int object = static_cast<int>(uniform_index(rng, tax.num_objects()));
    ds.external.push_back(sample_object_instance(world, tax, object, rng));
  }

  std::vector<std::int64_t> counts(num_cat, 0);
  for (const auto& inst : ds.train) {
    for (int c = 0; c < num_cat; ++c) counts[c] += inst.hoi_label[c];
  }
  ds.taxonomy = tax.with_train_counts(std::move(counts));
  return ds;
}

void check_instance(const HoiInstance& inst, const Taxonomy& tax, int feat_dim) {
  if (!inst.human_box.valid() || !inst.object_box.valid()) {
    throw std::invalid_argument("instance has a degenerate box");
  }
  if (inst.object_label < 0 || inst.object_label >= tax.num_objects()) {
    throw std::invalid_argument("instance object label out of range");
  }
  if (inst.hoi_label.size() != static_cast<std::size_t>(tax.num_categories())) {
    throw std::invalid_argument("instance label length mismatch");
  }
  const Label objects = decouple_object(inst.hoi_label, tax);
  if (objects != one_hot(inst.object_label, tax.num_objects())) {
    throw std::invalid_argument("instance label disagrees with its object label");
  }
  const auto dim = static_cast<std::size_t>(feat_dim);
  if (inst.human_feat.size() != dim || inst.verb_feat.size() != dim ||
      inst.object_feat.size() != dim) {
    throw std::invalid_argument("instance feature dimension mismatch");
  }
}

}  // namespace atl
