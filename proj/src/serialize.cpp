// Copyright 2026 The ATL Authors
// SPDX-License-Identifier: Apache-2.0

#include "atl/serialize.hpp"

#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <set>
#include <sstream>

#include "atl/error.hpp"

namespace atl {
namespace {

const Json& field(const Json& j, const char* key) {
  if (!j.is_object()) throw DataError(std::string("expected an object holding '") + key + "'");
  const auto it = j.find(key);
  if (it == j.end()) throw DataError(std::string("missing field '") + key + "'");
  return *it;
}

template <typename T>
T get(const Json& j, const char* key) {
  try {
    return field(j, key).get<T>();
  } catch (const nlohmann::json::exception& e) {
    throw DataError(std::string("field '") + key + "': " + e.what());
  }
}

void expect_format(const Json& j, const char* format) {
  if (get<std::string>(j, "format") != format) {
    throw DataError(std::string("expected format '") + format + "'");
  }
  if (get<int>(j, "version") != kFormatVersion) {
    throw DataError("unsupported " + std::string(format) + " version");
  }
}

Json header(const char* format) {
  Json j;
  j["format"] = format;
  j["version"] = kFormatVersion;
  return j;
}

Json box_json(const Box& b) { return Json::array({b.x1, b.y1, b.x2, b.y2}); }

Box box_from(const Json& j, const char* key) {
  const auto v = get<std::vector<double>>(j, key);
  if (v.size() != 4) throw DataError(std::string("field '") + key + "' must hold 4 numbers");
  const Box b{v[0], v[1], v[2], v[3]};
  if (!b.valid()) throw DataError(std::string("field '") + key + "' is a degenerate box");
  return b;
}

std::vector<double> features(const Json& j, const char* key) {
  auto v = get<std::vector<double>>(j, key);
  for (const double x : v) {
    if (!std::isfinite(x)) throw DataError(std::string("field '") + key + "' is not finite");
  }
  return v;
}

Json matrix_json(const Matrix& m) { return m.data; }

Matrix matrix_from(const Json& j, const char* key, std::size_t rows, std::size_t cols) {
  Matrix m(rows, cols);
  m.data = features(j, key);
  if (m.data.size() != rows * cols) {
    throw DataError(std::string("field '") + key + "' has " + std::to_string(m.data.size()) +
                    " values, expected " + std::to_string(rows * cols));
  }
  return m;
}

std::string csv_number(double x) { return format_double(x); }

}  // namespace

std::string format_double(double x) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof(buf), x);
  return std::string(buf, res.ptr);
}

Json to_json(const Taxonomy& tax) {
  Json j = header("atl-taxonomy");
  j["verbs"] = tax.verb_names();
  j["objects"] = tax.object_names();
  Json pairs = Json::array();
  for (const auto& p : tax.pairs()) pairs.push_back({p.verb, p.object});
  j["pairs"] = std::move(pairs);
  j["train_counts"] = tax.train_counts();
  std::vector<int> none;
  for (int v = 0; v < tax.num_verbs(); ++v) {
    if (tax.is_no_interaction(v)) none.push_back(v);
  }
  j["no_interaction"] = none;
  return j;
}

Taxonomy taxonomy_from_json(const Json& j) {
  expect_format(j, "atl-taxonomy");
  auto verbs = get<std::vector<std::string>>(j, "verbs");
  auto objects = get<std::vector<std::string>>(j, "objects");
  std::vector<HoiPair> pairs;
  for (const auto& p : field(j, "pairs")) {
    if (!p.is_array() || p.size() != 2) throw DataError("field 'pairs': entries must be [verb, object]");
    pairs.push_back({p[0].get<int>(), p[1].get<int>()});
  }
  auto counts = get<std::vector<std::int64_t>>(j, "train_counts");
  std::vector<bool> none(verbs.size(), false);
  if (j.contains("no_interaction")) {
    for (const int v : get<std::vector<int>>(j, "no_interaction")) {
      if (v < 0 || v >= static_cast<int>(verbs.size())) {
        throw DataError("field 'no_interaction': verb id out of range");
      }
      none[v] = true;
    }
  }
  try {
    return Taxonomy(std::move(verbs), std::move(objects), std::move(pairs), std::move(counts),
                    std::move(none));
  } catch (const std::logic_error& e) {
    throw DataError(std::string("invalid taxonomy: ") + e.what());
  }
}

Json to_json(const WorldSpec& w) {
  Json j = header("atl-world");
  j["feat_dim"] = w.feat_dim;
  j["noise_sigma"] = w.noise_sigma;
  j["tail_exponent"] = w.tail_exponent;
  j["co_label_prob"] = w.co_label_prob;
  j["seed"] = w.seed;
  j["verb_prototypes"] = w.verb_prototypes;
  j["object_prototypes"] = w.object_prototypes;
  Json offsets = Json::array();
  for (const auto& o : w.verb_offsets) offsets.push_back({o[0], o[1]});
  j["verb_offsets"] = std::move(offsets);
  j["object_domain_shift"] = w.object_domain_shift;
  return j;
}

WorldSpec world_from_json(const Json& j) {
  expect_format(j, "atl-world");
  WorldSpec w;
  w.feat_dim = get<int>(j, "feat_dim");
  w.noise_sigma = get<double>(j, "noise_sigma");
  w.tail_exponent = get<double>(j, "tail_exponent");
  w.co_label_prob = get<double>(j, "co_label_prob");
  w.seed = get<std::uint64_t>(j, "seed");
  w.verb_prototypes = get<std::vector<std::vector<double>>>(j, "verb_prototypes");
  w.object_prototypes = get<std::vector<std::vector<double>>>(j, "object_prototypes");
  for (const auto& o : get<std::vector<std::vector<double>>>(j, "verb_offsets")) {
    if (o.size() != 2) throw DataError("field 'verb_offsets': entries must hold 2 numbers");
    w.verb_offsets.push_back({o[0], o[1]});
  }
  w.object_domain_shift = get<std::vector<double>>(j, "object_domain_shift");
  const auto dim = static_cast<std::size_t>(w.feat_dim);
  for (const auto* set : {&w.verb_prototypes, &w.object_prototypes}) {
    for (const auto& p : *set) {
      if (p.size() != dim) throw DataError("world: prototype dimension mismatch");
    }
  }
  if (w.object_domain_shift.size() != dim || w.verb_offsets.size() != w.verb_prototypes.size()) {
    throw DataError("world: shift or offset shape mismatch");
  }
  return w;
}

Json to_json(const HoiInstance& inst) {
  Json j;
  j["kind"] = "hoi";
  j["human_box"] = box_json(inst.human_box);
  j["object_box"] = box_json(inst.object_box);
  j["object_label"] = inst.object_label;
  std::vector<int> cats;
  for (std::size_t c = 0; c < inst.hoi_label.size(); ++c) {
    if (inst.hoi_label[c]) cats.push_back(static_cast<int>(c));
  }
  j["hoi_categories"] = cats;
  j["human_feat"] = inst.human_feat;
  j["verb_feat"] = inst.verb_feat;
  j["object_feat"] = inst.object_feat;
  return j;
}

HoiInstance hoi_instance_from_json(const Json& j, const Taxonomy& tax) {
  HoiInstance inst;
  inst.human_box = box_from(j, "human_box");
  inst.object_box = box_from(j, "object_box");
  inst.object_label = get<int>(j, "object_label");
  inst.hoi_label.assign(tax.num_categories(), 0);
  for (const int c : get<std::vector<int>>(j, "hoi_categories")) {
    if (c < 0 || c >= tax.num_categories()) throw DataError("hoi_categories: id out of range");
    inst.hoi_label[c] = 1;
  }
  inst.human_feat = features(j, "human_feat");
  inst.verb_feat = features(j, "verb_feat");
  inst.object_feat = features(j, "object_feat");
  try {
    check_instance(inst, tax, static_cast<int>(inst.verb_feat.size()));
  } catch (const std::invalid_argument& e) {
    throw DataError(e.what());
  }
  return inst;
}

Json to_json(const ObjectInstance& inst) {
  Json j;
  j["kind"] = "object";
  j["object_box"] = box_json(inst.object_box);
  j["object_label"] = inst.object_label;
  j["object_feat"] = inst.object_feat;
  return j;
}

ObjectInstance object_instance_from_json(const Json& j, const Taxonomy& tax) {
  ObjectInstance inst;
  inst.object_box = box_from(j, "object_box");
  inst.object_label = get<int>(j, "object_label");
  if (inst.object_label < 0 || inst.object_label >= tax.num_objects()) {
    throw DataError("object_label out of range");
  }
  inst.object_feat = features(j, "object_feat");
  return inst;
}

Json to_json(const Detection& d) {
  Json j;
  j["image_id"] = d.image_id;
  j["human_box"] = box_json(d.human);
  j["object_box"] = box_json(d.object);
  j["category"] = d.category;
  j["score"] = d.score;
  return j;
}

Detection detection_from_json(const Json& j) {
  Detection d;
  d.image_id = get<std::int64_t>(j, "image_id");
  d.human = box_from(j, "human_box");
  d.object = box_from(j, "object_box");
  d.category = get<int>(j, "category");
  d.score = get<double>(j, "score");
  if (!std::isfinite(d.score)) throw DataError("field 'score' is not finite");
  return d;
}

Json to_json(const MLPParams& p) {
  Json j;
  j["input_dim"] = p.input_dim();
  j["hidden_width"] = p.hidden_width();
  j["output_dim"] = p.output_dim();
  j["seed"] = p.seed;
  j["w1"] = matrix_json(p.w1);
  j["b1"] = p.b1;
  j["w2"] = matrix_json(p.w2);
  j["b2"] = p.b2;
  return j;
}

MLPParams mlp_from_json(const Json& j) {
  const auto in = get<std::size_t>(j, "input_dim");
  const auto hidden = get<std::size_t>(j, "hidden_width");
  const auto out = get<std::size_t>(j, "output_dim");
  MLPParams p;
  p.seed = get<std::uint64_t>(j, "seed");
  p.w1 = matrix_from(j, "w1", hidden, in);
  p.b1 = features(j, "b1");
  p.w2 = matrix_from(j, "w2", out, hidden);
  p.b2 = features(j, "b2");
  try {
    validate_shapes(p);
  } catch (const std::invalid_argument& e) {
    throw DataError(e.what());
  }
  return p;
}

Json to_json(const TrainConfig& c) {
  Json j;
  j["lambda1"] = c.lambda1;
  j["lambda2"] = c.lambda2;
  j["lambda_aux"] = c.lambda_aux;
  j["lr"] = c.lr;
  j["lr_decay_step"] = c.lr_decay_step;
  j["lr_decay"] = c.lr_decay;
  j["iterations"] = c.iterations;
  j["hoi_batch"] = c.hoi_batch;
  j["object_batch"] = c.object_batch;
  j["hidden_width"] = c.hidden_width;
  j["spatial_hidden_width"] = c.spatial_hidden_width;
  j["spatial_resolution"] = c.spatial_resolution;
  j["trace_every"] = c.trace_every;
  j["seed"] = c.seed;
  return j;
}

TrainConfig train_config_from_json(const Json& j, TrainConfig c) {
  if (!j.is_object()) throw ConfigError("train config must be an object");
  static const std::set<std::string> known = {
      "lambda1",    "lambda2",      "lambda_aux",   "lr",
      "lr_decay_step", "lr_decay",  "iterations",   "hoi_batch",
      "object_batch", "hidden_width", "spatial_hidden_width", "spatial_resolution",
      "trace_every", "seed"};
  for (const auto& [key, value] : j.items()) {
    if (!known.count(key)) throw ConfigError("train config: unknown key '" + key + "'");
  }
  const auto read = [&](const char* key, auto& slot) {
    if (!j.contains(key)) return;
    try {
      slot = j.at(key).get<std::decay_t<decltype(slot)>>();
    } catch (const nlohmann::json::exception& e) {
      throw ConfigError(std::string("train config: field '") + key + "': " + e.what());
    }
  };
  read("lambda1", c.lambda1);
  read("lambda2", c.lambda2);
  read("lambda_aux", c.lambda_aux);
  read("lr", c.lr);
  read("lr_decay_step", c.lr_decay_step);
  read("lr_decay", c.lr_decay);
  read("iterations", c.iterations);
  read("hoi_batch", c.hoi_batch);
  read("object_batch", c.object_batch);
  read("hidden_width", c.hidden_width);
  read("spatial_hidden_width", c.spatial_hidden_width);
  read("spatial_resolution", c.spatial_resolution);
  read("trace_every", c.trace_every);
  read("seed", c.seed);
  validate(c);
  return c;
}

Json to_json(const HoiModel& m, const TrainConfig& cfg) {
  Json j = header("atl-checkpoint");
  j["seed"] = cfg.seed;
  j["config"] = to_json(cfg);
  j["feat_dim"] = m.feat_dim;
  j["spatial_resolution"] = m.spatial_resolution;
  j["spatial"] = to_json(m.spatial);
  j["interaction"] = to_json(m.interaction);
  if (m.has_verb_head()) j["verb_head"] = to_json(m.verb_head);
  return j;
}

HoiModel checkpoint_from_json(const Json& j, TrainConfig* cfg) {
  expect_format(j, "atl-checkpoint");
  HoiModel m;
  m.feat_dim = get<int>(j, "feat_dim");
  m.spatial_resolution = get<int>(j, "spatial_resolution");
  m.spatial = mlp_from_json(field(j, "spatial"));
  m.interaction = mlp_from_json(field(j, "interaction"));
  if (j.contains("verb_head")) m.verb_head = mlp_from_json(j.at("verb_head"));
  const auto d = static_cast<std::size_t>(m.feat_dim);
  const auto r = static_cast<std::size_t>(m.spatial_resolution);
  if (m.interaction.input_dim() != 2 * d || m.spatial.input_dim() != 2 * r * r + d ||
      m.spatial.output_dim() != m.interaction.output_dim()) {
    throw DataError("checkpoint: classifier shapes are inconsistent");
  }
  if (cfg) {
    try {
      *cfg = train_config_from_json(field(j, "config"));
    } catch (const ConfigError& e) {
      throw DataError(std::string("checkpoint config: ") + e.what());
    }
  }
  return m;
}

Json to_json(const AffordanceBank& bank) {
  Json j = header("atl-bank");
  j["M"] = bank.cap;
  j["feat_dim"] = bank.feat_dim;
  j["source_seed"] = bank.source_seed;
  std::vector<std::size_t> counts;
  for (const auto& e : bank.entries) counts.push_back(e.size());
  j["counts"] = counts;
  j["entries"] = bank.entries;
  return j;
}

AffordanceBank bank_from_json(const Json& j) {
  expect_format(j, "atl-bank");
  AffordanceBank bank;
  bank.cap = get<int>(j, "M");
  bank.feat_dim = get<int>(j, "feat_dim");
  bank.source_seed = get<std::uint64_t>(j, "source_seed");
  bank.entries = get<std::vector<std::vector<std::vector<double>>>>(j, "entries");
  const auto counts = get<std::vector<std::size_t>>(j, "counts");
  if (counts.size() != bank.entries.size()) throw DataError("bank: counts length mismatch");
  for (std::size_t v = 0; v < counts.size(); ++v) {
    if (counts[v] != bank.entries[v].size()) throw DataError("bank: counts disagree with entries");
    if (counts[v] > static_cast<std::size_t>(bank.cap)) throw DataError("bank: S_i exceeds M");
    for (const auto& f : bank.entries[v]) {
      if (f.size() != static_cast<std::size_t>(bank.feat_dim)) {
        throw DataError("bank: feature dimension mismatch");
      }
    }
  }
  if (bank.cap < 1) throw DataError("bank: M must be >= 1");
  return bank;
}

Json to_json(const SplitSpec& s) {
  Json j = header("atl-split");
  j["mode"] = std::string(to_string(s.mode));
  j["unseen_hoi_ids"] = s.unseen_hoi_ids;
  j["seen_hoi_ids"] = s.seen_hoi_ids;
  j["unseen_object_ids"] = s.unseen_object_ids;
  return j;
}

SplitSpec split_from_json(const Json& j) {
  expect_format(j, "atl-split");
  SplitSpec s;
  try {
    s.mode = parse_split_mode(get<std::string>(j, "mode"));
  } catch (const ConfigError& e) {
    throw DataError(e.what());
  }
  s.unseen_hoi_ids = get<std::vector<int>>(j, "unseen_hoi_ids");
  s.seen_hoi_ids = get<std::vector<int>>(j, "seen_hoi_ids");
  s.unseen_object_ids = get<std::vector<int>>(j, "unseen_object_ids");
  return s;
}

Json to_json(const GradReport& r) {
  Json j;
  j["max_rel_error"] = r.max_rel_error;
  Json per = Json::object();
  for (const auto& [name, err] : r.per_parameter) per[name] = err;
  j["per_parameter"] = std::move(per);
  j["checked"] = r.checked;
  j["skipped_kinks"] = r.skipped_kinks;
  return j;
}

Json to_json(const AffordanceScores& s, const Taxonomy& tax) {
  Json verbs = Json::array();
  for (int v = 0; v < tax.num_verbs(); ++v) {
    Json e;
    e["verb"] = tax.verb_names()[v];
    e["F"] = s.hits[v];
    e["S"] = s.bank_counts[v];
    e["score"] = s.score[v] ? Json(*s.score[v]) : Json(nullptr);
    verbs.push_back(std::move(e));
  }
  Json j;
  j["verbs"] = std::move(verbs);
  Json kept = Json::array();
  for (const int v : s.kept) kept.push_back(tax.verb_names()[v]);
  j["kept"] = std::move(kept);
  return j;
}

Json to_json(const Prf1& p) {
  Json j;
  j["precision"] = p.precision;
  j["recall"] = p.recall;
  j["f1"] = p.f1;
  j["precision_undefined"] = p.precision_undefined;
  return j;
}

Json to_json(const EvalReport& r, const Taxonomy& tax) {
  Json j = header("atl-eval-report");
  j["split_mode"] = std::string(to_string(r.split_mode));
  j["rare_threshold"] = r.rare_threshold;
  Json groups = Json::object();
  for (const auto& g : r.groups) {
    groups[g.name] = {{"mAP", g.mean_ap}, {"categories", g.categories}};
  }
  j["groups"] = std::move(groups);
  Json cats = Json::array();
  for (int c = 0; c < tax.num_categories(); ++c) {
    const auto& p = tax.pair(c);
    cats.push_back({{"category", c},
                    {"verb", tax.verb_names()[p.verb]},
                    {"object", tax.object_names()[p.object]},
                    {"train_count", tax.train_counts()[c]},
                    {"positives", r.category_positives[c]},
                    {"ap", r.category_ap[c] ? Json(*r.category_ap[c]) : Json(nullptr)}});
  }
  j["categories"] = std::move(cats);
  return j;
}

std::string report_csv(const EvalReport& r, const Taxonomy& tax) {
  std::ostringstream out;
  out << "category,verb,object,train_count,positives,ap\n";
  for (int c = 0; c < tax.num_categories(); ++c) {
    const auto& p = tax.pair(c);
    out << c << ',' << tax.verb_names()[p.verb] << ',' << tax.object_names()[p.object] << ','
        << tax.train_counts()[c] << ',' << r.category_positives[c] << ','
        << (r.category_ap[c] ? csv_number(*r.category_ap[c]) : "") << '\n';
  }
  out << "\ngroup,mAP,categories\n";
  for (const auto& g : r.groups) {
    out << g.name << ',' << csv_number(g.mean_ap) << ',' << g.categories << '\n';
  }
  return out.str();
}

std::string loss_trace_csv(const std::vector<LossRecord>& trace) {
  std::ostringstream out;
  out << "step,L_sp,L_hoi,L_ATL,L_total\n";
  for (const auto& r : trace) {
    out << r.step << ',' << csv_number(r.sp) << ',' << csv_number(r.hoi) << ','
        << csv_number(r.atl) << ',' << csv_number(r.total) << '\n';
  }
  return out.str();
}

std::string read_text(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot open '" + path.string() + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_text(const std::filesystem::path& path, const std::string& text) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary);
  if (!out) throw DataError("cannot write '" + path.string() + "'");
  out << text;
  if (!out) throw DataError("write failed for '" + path.string() + "'");
}

Json read_json(const std::filesystem::path& path) {
  try {
    return Json::parse(read_text(path));
  } catch (const nlohmann::json::parse_error& e) {
    throw DataError("'" + path.string() + "' is not valid JSON: " + e.what());
  }
}

void write_json(const std::filesystem::path& path, const Json& j) {
  write_text(path, j.dump(2) + "\n");
}

std::vector<Json> read_jsonl(const std::filesystem::path& path) {
  std::istringstream in(read_text(path));
  std::vector<Json> rows;
  std::string line;
  std::size_t number = 0;
  while (std::getline(in, line)) {
    ++number;
    if (line.empty()) continue;
    try {
      rows.push_back(Json::parse(line));
    } catch (const nlohmann::json::parse_error& e) {
      throw DataError("'" + path.string() + "' line " + std::to_string(number) + ": " + e.what());
    }
  }
  return rows;
}

void write_jsonl(const std::filesystem::path& path, const std::vector<Json>& rows) {
  std::string text;
  for (const auto& r : rows) {
    text += r.dump();
    text += '\n';
  }
  write_text(path, text);
}

std::vector<HoiInstance> read_hoi_set(const std::filesystem::path& path, const Taxonomy& tax) {
  std::vector<HoiInstance> out;
  for (const auto& row : read_jsonl(path)) out.push_back(hoi_instance_from_json(row, tax));
  return out;
}

void write_hoi_set(const std::filesystem::path& path, const std::vector<HoiInstance>& set) {
  std::vector<Json> rows;
  rows.reserve(set.size());
  for (const auto& inst : set) rows.push_back(to_json(inst));
  write_jsonl(path, rows);
}

std::vector<ObjectInstance> read_object_set(const std::filesystem::path& path,
                                            const Taxonomy& tax) {
  std::vector<ObjectInstance> out;
  for (const auto& row : read_jsonl(path)) out.push_back(object_instance_from_json(row, tax));
  return out;
}

void write_object_set(const std::filesystem::path& path,
                      const std::vector<ObjectInstance>& set) {
  std::vector<Json> rows;
  rows.reserve(set.size());
  for (const auto& inst : set) rows.push_back(to_json(inst));
  write_jsonl(path, rows);
}

std::string text_hash(std::string_view text) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (const char c : text) {
    h ^= static_cast<unsigned char>(c);
    h *= 0x100000001b3ULL;
  }
  char buf[17];
  std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

std::string content_hash(const Json& j) { return text_hash(j.dump()); }

}  // namespace atl
