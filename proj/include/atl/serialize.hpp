// Copyright 2026 The ATL Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

// On-disk formats. Every document carries "format" and "version" fields and
// every loader validates shapes and invariants, throwing DataError with the
// offending field.
//
//   taxonomy.json    verbs[], objects[], pairs[[verb, object]], train_counts[]
//   *.jsonl          one HOI/object/prediction record per line
//   checkpoint.json  both classifiers, config, seed; row-major weights
//   bank.json        M, per-verb counts, feature arrays
//   split.json       mode, unseen/seen category ids, unseen object ids

#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "atl/affordance.hpp"
#include "atl/evalkit.hpp"
#include "atl/nn.hpp"
#include "atl/pipeline.hpp"
#include "atl/split.hpp"
#include "atl/synthgen.hpp"
#include "atl/taxonomy.hpp"

namespace atl {

using Json = nlohmann::ordered_json;

inline constexpr int kFormatVersion = 1;

Json to_json(const Taxonomy& tax);
Taxonomy taxonomy_from_json(const Json& j);

Json to_json(const WorldSpec& world);
WorldSpec world_from_json(const Json& j);

Json to_json(const HoiInstance& inst);
HoiInstance hoi_instance_from_json(const Json& j, const Taxonomy& tax);

Json to_json(const ObjectInstance& inst);
ObjectInstance object_instance_from_json(const Json& j, const Taxonomy& tax);

Json to_json(const Detection& det);
Detection detection_from_json(const Json& j);

Json to_json(const MLPParams& params);
MLPParams mlp_from_json(const Json& j);

Json to_json(const TrainConfig& cfg);
// Unknown keys are rejected with ConfigError; missing keys keep defaults.
TrainConfig train_config_from_json(const Json& j, TrainConfig base = {});

Json to_json(const HoiModel& model, const TrainConfig& cfg);
HoiModel checkpoint_from_json(const Json& j, TrainConfig* cfg = nullptr);

Json to_json(const AffordanceBank& bank);
AffordanceBank bank_from_json(const Json& j);

Json to_json(const SplitSpec& split);
SplitSpec split_from_json(const Json& j);

Json to_json(const GradReport& report);
Json to_json(const AffordanceScores& scores, const Taxonomy& tax);
Json to_json(const Prf1& prf1);
Json to_json(const EvalReport& report, const Taxonomy& tax);

// One row per category, then one row per group.
std::string report_csv(const EvalReport& report, const Taxonomy& tax);
// Columns: step,L_sp,L_hoi,L_ATL,L_total
std::string loss_trace_csv(const std::vector<LossRecord>& trace);

// Shortest round-trip formatting of doubles.
std::string format_double(double x);

std::string read_text(const std::filesystem::path& path);
void write_text(const std::filesystem::path& path, const std::string& text);
Json read_json(const std::filesystem::path& path);
void write_json(const std::filesystem::path& path, const Json& j);
std::vector<Json> read_jsonl(const std::filesystem::path& path);
void write_jsonl(const std::filesystem::path& path, const std::vector<Json>& rows);

std::vector<HoiInstance> read_hoi_set(const std::filesystem::path& path, const Taxonomy& tax);
void write_hoi_set(const std::filesystem::path& path, const std::vector<HoiInstance>& set);
std::vector<ObjectInstance> read_object_set(const std::filesystem::path& path,
                                            const Taxonomy& tax);
void write_object_set(const std::filesystem::path& path,
                      const std::vector<ObjectInstance>& set);

// 64-bit FNV-1a as 16 hex digits; stable across runs and platforms.
std::string text_hash(std::string_view text);
// text_hash of the compact dump.
std::string content_hash(const Json& j);

}  // namespace atl
