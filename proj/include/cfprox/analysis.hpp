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
#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "cfprox/explain.hpp"

namespace cfprox {

// Pearson product-moment correlation. Throws DataError on a length
// mismatch, fewer than two points, or zero variance.
double pearson(std::span<const double> xs, std::span<const double> ys);

// Spearman rank correlation (Pearson on average ranks).
double spearman(std::span<const double> xs, std::span<const double> ys);

struct OlsResult {
  double slope = 0.0;
  double intercept = 0.0;
  double test_mse = 0.0;
  std::size_t n_train = 0;
  std::size_t n_test = 0;
};

// One-feature least squares on a seeded random `train_fraction` of the
// (x, y) pairs, scored by mean squared error on the rest. The training part
// holds round(train_fraction * n) points, clamped to [2, n - 1].
OlsResult ols_fit_eval(std::span<const std::pair<double, double>> pairs,
                       double train_fraction, std::uint64_t seed);

struct TTestResult {
  double t = 0.0;
  double p = 0.0;
  std::size_t n = 0;
  double mean_a = 0.0;
  double sd_a = 0.0;
  double mean_b = 0.0;
  double sd_b = 0.0;
};

// Paired t-test with H1: mean(a) > mean(b). p = P(T_{n-1} > t).
TTestResult paired_ttest_upper(std::span<const double> a,
                               std::span<const double> b);

inline constexpr std::array<std::string_view, 7> kDimensions = {
    "Explainability", "Informativeness", "Effectiveness", "Persuasiveness",
    "Transparency",   "Trustworthiness", "Satisfaction"};

struct RatingRow {
  std::string question_id;
  std::string explanation_id;
  std::string dimension;
  std::string participant_id;
  int rating = 0;
};

// Survey answers, header
// `question_id,explanation_id,dimension,participant_id,rating`.
struct RatingTable {
  std::vector<RatingRow> rows;
};

// Throws ParseError / ValidationError (unknown dimension, rating outside
// 1..5, empty table).
RatingTable load_rating_table(const std::filesystem::path& path);

// One evaluated explanation as emitted in a survey bundle.
struct ExplanationScores {
  std::string id;         // "<bundle>/<kind>-<level>"
  std::string bundle_id;
  std::string label;      // "<kind>-<level>"
  std::array<double, 4> scores{};  // indexed like kScoreKinds
};

struct TTestComparison {
  std::string name;
  std::string label_a;
  std::string label_b;
};

// high-CF vs low-CF, high-CF vs high-Item-Sim, high-CF vs high-Genre-Jacc.
const std::vector<TTestComparison>& default_comparisons();

using Cell = std::pair<ScoreKind, std::string>;

struct AnalysisReport {
  std::map<Cell, std::optional<double>> correlations;
  std::map<Cell, std::optional<OlsResult>> regression;
  std::map<std::pair<std::string, std::string>, std::optional<TTestResult>>
      ttests;  // (comparison name, dimension)
  std::size_t explanations = 0;
  std::size_t ratings = 0;
  std::vector<std::string> notes;
};

struct AnalysisOptions {
  double train_fraction = 0.7;
  std::uint64_t split_seed = 11;
};

// Averages ratings over participants per (explanation, dimension), then
// fills every (score kind, dimension) correlation and regression cell, and
// the paired t-tests of default_comparisons() (pairs are matched on
// participant and bundle). Degenerate cells are left empty with a note.
// Throws DataError listing rating rows whose explanation id is unknown.
AnalysisReport build_report(std::span<const ExplanationScores> explanations,
                            const RatingTable& ratings,
                            const AnalysisOptions& options = {});

}  // namespace cfprox
