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

#include "cfprox/analysis.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numeric>
#include <random>
#include <set>
#include <sstream>
#include <tuple>

#include "cfprox/student_t.hpp"
#include "csv.hpp"

namespace cfprox {
namespace {

double mean_of(std::span<const double> xs) {
  return std::accumulate(xs.begin(), xs.end(), 0.0) /
         static_cast<double>(xs.size());
}

// Sample standard deviation (n - 1 denominator); 0 for a single value.
double sd_of(std::span<const double> xs) {
  if (xs.size() < 2) return 0.0;
  const double m = mean_of(xs);
  double ss = 0.0;
  for (double x : xs) ss += (x - m) * (x - m);
  return std::sqrt(ss / static_cast<double>(xs.size() - 1));
}

std::vector<double> average_ranks(std::span<const double> xs) {
  std::vector<std::size_t> order(xs.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return xs[a] < xs[b]; });
  std::vector<double> ranks(xs.size());
  for (std::size_t lo = 0; lo < order.size();) {
    std::size_t hi = lo + 1;
    while (hi < order.size() && xs[order[hi]] == xs[order[lo]]) ++hi;
    const double r = 0.5 * static_cast<double>(lo + hi - 1) + 1.0;
    for (std::size_t k = lo; k < hi; ++k) ranks[order[k]] = r;
    lo = hi;
  }
  return ranks;
}

bool is_dimension(std::string_view name) {
  return std::find(kDimensions.begin(), kDimensions.end(), name) !=
         kDimensions.end();
}

}  // namespace

double pearson(std::span<const double> xs, std::span<const double> ys) {
  if (xs.size() != ys.size()) throw DataError("pearson: length mismatch");
  if (xs.size() < 2) throw DataError("pearson: need at least two points");
  const double mx = mean_of(xs), my = mean_of(ys);
  double sxy = 0.0, sxx = 0.0, syy = 0.0;
  for (std::size_t k = 0; k < xs.size(); ++k) {
    const double dx = xs[k] - mx, dy = ys[k] - my;
    sxy += dx * dy;
    sxx += dx * dx;
    syy += dy * dy;
  }
  if (sxx == 0.0 || syy == 0.0) throw DataError("pearson: zero variance");
  return std::clamp(sxy / std::sqrt(sxx * syy), -1.0, 1.0);
}

double spearman(std::span<const double> xs, std::span<const double> ys) {
  if (xs.size() != ys.size()) throw DataError("spearman: length mismatch");
  const auto rx = average_ranks(xs);
  const auto ry = average_ranks(ys);
  return pearson(rx, ry);
}

OlsResult ols_fit_eval(std::span<const std::pair<double, double>> pairs,
                       double train_fraction, std::uint64_t seed) {
  const std::size_t n = pairs.size();
  if (n < 3) throw DataError("regression needs at least three points");
  if (!(train_fraction > 0.0 && train_fraction < 1.0)) {
    throw ConfigError("train fraction must lie in (0, 1)");
  }
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::mt19937_64 rng(seed);
  std::shuffle(order.begin(), order.end(), rng);
  const auto n_train = std::clamp<std::size_t>(
      static_cast<std::size_t>(std::llround(train_fraction * static_cast<double>(n))),
      2, n - 1);

  double mx = 0.0, my = 0.0;
  for (std::size_t k = 0; k < n_train; ++k) {
    mx += pairs[order[k]].first;
    my += pairs[order[k]].second;
  }
  mx /= static_cast<double>(n_train);
  my /= static_cast<double>(n_train);
  double sxy = 0.0, sxx = 0.0;
  for (std::size_t k = 0; k < n_train; ++k) {
    const double dx = pairs[order[k]].first - mx;
    sxy += dx * (pairs[order[k]].second - my);
    sxx += dx * dx;
  }
  if (sxx == 0.0) throw DataError("regression training scores have zero variance");

  OlsResult fit;
  fit.slope = sxy / sxx;
  fit.intercept = my - fit.slope * mx;
  fit.n_train = n_train;
  fit.n_test = n - n_train;
  double sse = 0.0;
  for (std::size_t k = n_train; k < n; ++k) {
    const auto& [x, y] = pairs[order[k]];
    const double err = y - (fit.slope * x + fit.intercept);
    sse += err * err;
  }
  fit.test_mse = sse / static_cast<double>(fit.n_test);
  return fit;
}

TTestResult paired_ttest_upper(std::span<const double> a,
                               std::span<const double> b) {
  if (a.size() != b.size()) throw DataError("paired t-test: length mismatch");
  const std::size_t n = a.size();
  if (n < 2) throw DataError("paired t-test: need at least two pairs");
  std::vector<double> diff(n);
  for (std::size_t k = 0; k < n; ++k) diff[k] = a[k] - b[k];
  const double md = mean_of(diff);
  const double sd = sd_of(diff);
  if (sd == 0.0) {
    throw DataError("paired t-test: differences have zero variance");
  }
  TTestResult r;
  r.n = n;
  r.t = md / (sd / std::sqrt(static_cast<double>(n)));
  r.p = student_t_upper_tail(r.t, static_cast<double>(n - 1));
  r.mean_a = mean_of(a);
  r.sd_a = sd_of(a);
  r.mean_b = mean_of(b);
  r.sd_b = sd_of(b);
  return r;
}

RatingTable load_rating_table(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot open ratings table " + path.string());
  const std::string file = path.string();
  std::string line;
  if (!std::getline(in, line)) throw ParseError(file, 1, 1, "empty file");
  if (!line.empty() && line.back() == '\r') line.pop_back();
  if (line != "question_id,explanation_id,dimension,participant_id,rating") {
    throw ParseError(file, 1, 1, "unexpected header `" + line + "`");
  }
  RatingTable table;
  std::vector<std::string> fields;
  std::size_t bad = 0;
  for (std::size_t line_no = 2; std::getline(in, line); ++line_no) {
    if (line.empty() || line == "\r") continue;
    if (!csv::split_record(line, fields, bad)) {
      throw ParseError(file, line_no, bad, "unterminated quote");
    }
    if (fields.size() != 5) {
      throw ParseError(file, line_no, std::min<std::size_t>(fields.size(), 6),
                       "expected 5 columns, got " + std::to_string(fields.size()));
    }
    std::int64_t rating = 0;
    if (!csv::parse_int(fields[4], rating)) {
      throw ParseError(file, line_no, 5, "bad rating `" + fields[4] + "`");
    }
    if (rating < 1 || rating > 5) {
      throw ValidationError(file + ":" + std::to_string(line_no) + ": rating " +
                            std::to_string(rating) + " outside 1..5");
    }
    if (!is_dimension(fields[2])) {
      throw ValidationError(file + ":" + std::to_string(line_no) +
                            ": unknown dimension `" + fields[2] + "`");
    }
    table.rows.push_back({fields[0], fields[1], fields[2], fields[3],
                          static_cast<int>(rating)});
  }
  if (table.rows.empty()) throw ValidationError(file + ": no ratings");
  return table;
}

const std::vector<TTestComparison>& default_comparisons() {
  static const std::vector<TTestComparison> comparisons = {
      {"high-cf_vs_low-cf", "cf-high", "cf-low"},
      {"high-cf_vs_high-item_sim", "cf-high", "item_sim-high"},
      {"high-cf_vs_high-genre_jacc", "cf-high", "genre_jacc-high"},
  };
  return comparisons;
}

AnalysisReport build_report(std::span<const ExplanationScores> explanations,
                            const RatingTable& ratings,
                            const AnalysisOptions& options) {
  std::map<std::string, const ExplanationScores*> by_id;
  for (const auto& e : explanations) {
    if (!by_id.emplace(e.id, &e).second) {
      throw DataError("duplicate explanation id " + e.id);
    }
  }
  std::set<std::string> unknown;
  for (const auto& row : ratings.rows) {
    if (!by_id.count(row.explanation_id)) unknown.insert(row.explanation_id);
    if (!is_dimension(row.dimension)) {
      throw ValidationError("unknown dimension `" + row.dimension + "`");
    }
    if (row.rating < 1 || row.rating > 5) {
      throw ValidationError("rating outside 1..5");
    }
  }
  if (!unknown.empty()) {
    std::string list;
    for (const auto& id : unknown) list += (list.empty() ? "" : ", ") + id;
    throw DataError("ratings reference unknown explanation ids: " + list);
  }
  if (ratings.rows.empty()) throw ValidationError("no ratings to analyze");

  AnalysisReport report;
  report.explanations = explanations.size();
  report.ratings = ratings.rows.size();

  // (explanation, dimension) -> mean over participants.
  std::map<std::pair<std::string, std::string>, std::pair<double, int>> sums;
  // (participant, explanation, dimension) -> mean over repeats.
  std::map<std::tuple<std::string, std::string, std::string>,
           std::pair<double, int>>
      per_participant;
  for (const auto& row : ratings.rows) {
    auto& s = sums[{row.explanation_id, row.dimension}];
    s.first += row.rating;
    ++s.second;
    auto& p = per_participant[{row.participant_id, row.explanation_id, row.dimension}];
    p.first += row.rating;
    ++p.second;
  }

  for (std::size_t k = 0; k < kScoreKinds.size(); ++k) {
    const ScoreKind kind = kScoreKinds[k];
    for (std::string_view dim_view : kDimensions) {
      const std::string dim(dim_view);
      std::vector<double> xs, ys;
      std::vector<std::pair<double, double>> pairs;
      for (const auto& e : explanations) {
        auto it = sums.find({e.id, dim});
        if (it == sums.end()) continue;
        const double avg = it->second.first / it->second.second;
        xs.push_back(e.scores[k]);
        ys.push_back(avg);
        pairs.emplace_back(e.scores[k], avg);
      }
      const Cell cell{kind, dim};
      const std::string where =
          std::string(to_string(kind)) + " x " + dim + ": ";
      try {
        report.correlations[cell] = pearson(xs, ys);
      } catch (const DataError& err) {
        report.correlations[cell] = std::nullopt;
        report.notes.push_back(where + err.what());
      }
      try {
        report.regression[cell] =
            ols_fit_eval(pairs, options.train_fraction, options.split_seed);
      } catch (const DataError& err) {
        report.regression[cell] = std::nullopt;
        report.notes.push_back(where + err.what());
      }
    }
  }

  // Bundles present in the explanation list, in id order.
  std::set<std::string> bundles;
  for (const auto& e : explanations) bundles.insert(e.bundle_id);
  std::set<std::string> participants;
  for (const auto& row : ratings.rows) participants.insert(row.participant_id);

  for (const auto& cmp : default_comparisons()) {
    for (std::string_view dim_view : kDimensions) {
      const std::string dim(dim_view);
      std::vector<double> a, b;
      for (const auto& bundle : bundles) {
        const std::string id_a = bundle + "/" + cmp.label_a;
        const std::string id_b = bundle + "/" + cmp.label_b;
        for (const auto& who : participants) {
          auto ra = per_participant.find({who, id_a, dim});
          auto rb = per_participant.find({who, id_b, dim});
          if (ra == per_participant.end() || rb == per_participant.end()) continue;
          a.push_back(ra->second.first / ra->second.second);
          b.push_back(rb->second.first / rb->second.second);
        }
      }
      const auto key = std::make_pair(cmp.name, dim);
      try {
        report.ttests[key] = paired_ttest_upper(a, b);
      } catch (const DataError& err) {
        report.ttests[key] = std::nullopt;
        report.notes.push_back(cmp.name + " x " + dim + ": " + err.what());
      }
    }
  }
  return report;
}

}  // namespace cfprox
