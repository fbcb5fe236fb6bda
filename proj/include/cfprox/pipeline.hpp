// Copyright 2026 The cfprox Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <array>
#include <cstddef>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "cfprox/analysis.hpp"
#include "cfprox/config.hpp"
#include "cfprox/counterfactual.hpp"
#include "cfprox/dataset.hpp"
#include "cfprox/explain.hpp"
#include "cfprox/mf.hpp"

namespace cfprox {

inline constexpr int kBundleSchemaVersion = 1;

struct DatasetSummary {
  std::size_t users = 0;
  std::size_t items = 0;
  std::size_t interactions = 0;
  std::size_t items_without_ratings = 0;
  std::size_t items_with_genres = 0;
  std::size_t distinct_genres = 0;

  std::string to_text() const;
};

DatasetSummary summarize(const InteractionDataset& dataset);

// Binary snapshot of a validated dataset (ids, rows, genres, titles).
std::string serialize_dataset(const InteractionDataset& dataset);
InteractionDataset deserialize_dataset(const std::string& bytes);

// The synthetic survey user folded into the training data.
struct PreparedSurvey {
  SyntheticHistory history;
  InteractionDataset dataset;  // base dataset plus the synthetic user
  std::size_t popularity_threshold = 0;
  std::size_t popular_items = 0;
};

PreparedSurvey prepare_survey(const InteractionDataset& base,
                              const PipelineConfig& config);

// All four scores of one candidate explanation plus wall-clock seconds per
// score (indexed like kScoreKinds).
struct CandidateScores {
  Explanation explanation;
  CfResult cf;
  CfResult cf_approx;
  double item_sim = 0.0;
  double genre_jacc = 0.0;
  std::array<double, 4> seconds{};
  std::vector<std::string> labels;

  double score(ScoreKind kind) const;
  std::array<double, 4> scores() const;
};

struct BundleExplanation {
  std::string label;  // "<kind>-<level>"
  ScoreKind kind;
  Level level;
  Explanation explanation;
  std::array<double, 4> scores{};
};

struct SurveyResult {
  UserId user{};
  std::vector<ItemId> history;
  ItemId recommended{};
  std::vector<CandidateScores> candidates;  // lexicographic order
  std::vector<SelectionTriple> selections;  // one per score kind
  std::vector<BundleExplanation> explanations;
  std::optional<double> spearman_cf_vs_approx;
  double cf_seconds = 0.0;         // all full retrains, wall clock
  double approx_seconds = 0.0;     // all CF^A evaluations, wall clock
  std::size_t trainings_checked = 0;
  std::size_t monotonicity_violations = 0;
  double worst_objective_rise = 0.0;
};

// Scores every k-subset of the history with CF (full retrain), CF^A
// (config.approx_strategy), Item-Sim and Genre-Jacc, then selects the
// high/mean/low explanation per score. Candidates are scored concurrently
// on config.workers threads; results do not depend on the worker count.
SurveyResult run_survey(const PreparedSurvey& prepared,
                        const FactorModel& base_model,
                        const PipelineConfig& config);

// Survey bundle JSON (schema version kBundleSchemaVersion). Byte-identical
// for identical inputs.
std::string bundle_json(const SurveyResult& result,
                        const PreparedSurvey& prepared,
                        const PipelineConfig& config,
                        const std::string& bundle_id);

// Reads the explanations and their four scores back out of a bundle.
std::vector<ExplanationScores> read_bundle(const std::string& json_text);

// One row per candidate: ids, items, the four scores, strategy tags,
// selection labels and per-score wall-clock milliseconds.
std::string score_report_csv(const SurveyResult& result,
                             const PipelineConfig& config);

std::string correlations_csv(const AnalysisReport& report);
std::string regression_csv(const AnalysisReport& report);
std::string ttests_csv(const AnalysisReport& report);
std::string report_json(const AnalysisReport& report);

enum class WriteMode {
  kVerifyIdentical,  // existing file must match byte for byte
  kKeepExisting,     // existing file is left as is
};

// Write-once output: creates `path` atomically, never overwrites. Returns
// true when the file was created. Throws DataError when kVerifyIdentical
// finds different bytes on disk.
bool write_once(const std::filesystem::path& path, const std::string& bytes,
                WriteMode mode);

std::string read_file(const std::filesystem::path& path);

}  // namespace cfprox
