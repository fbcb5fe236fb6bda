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

#include "cfprox/pipeline.hpp"

#include <algorithm>
#include <chrono>
#include <cstring>
#include <exception>
#include <fstream>
#include <iomanip>
#include <iterator>
#include <set>
#include <sstream>
#include <stdexcept>

#include <omp.h>

#include "cfprox/baselines.hpp"
#include "csv.hpp"
#include "json.hpp"

namespace cfprox {
namespace {

using Json = nlohmann::ordered_json;
using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point start) {
  return std::chrono::duration<double>(Clock::now() - start).count();
}

std::string num(double v) {
  std::ostringstream os;
  os << std::setprecision(10) << v;
  return os.str();
}

std::string items_field(const std::vector<ItemId>& items) {
  std::string out;
  for (std::size_t k = 0; k < items.size(); ++k) {
    if (k) out += ';';
    out += std::to_string(raw(items[k]));
  }
  return out;
}

Json item_json(const InteractionDataset& dataset, ItemId item) {
  Json j;
  j["item"] = raw(item);
  auto t = dataset.titles().find(item);
  j["title"] = t == dataset.titles().end() ? "" : t->second;
  auto g = dataset.genres().find(item);
  j["genres"] = g == dataset.genres().end() ? std::vector<std::string>{} : g->second;
  return j;
}

// Little-endian field codec for the dataset snapshot.
struct Writer {
  std::string out;
  template <typename T>
  void put(T v) {
    char buf[sizeof(T)];
    std::memcpy(buf, &v, sizeof(T));
    out.append(buf, sizeof(T));
  }
  void put_string(const std::string& s) {
    put<std::uint64_t>(s.size());
    out += s;
  }
};

struct Reader {
  const std::string& in;
  std::size_t pos = 0;
  template <typename T>
  T get() {
    if (in.size() - pos < sizeof(T)) throw DataError("dataset snapshot truncated");
    T v;
    std::memcpy(&v, in.data() + pos, sizeof(T));
    pos += sizeof(T);
    return v;
  }
  std::string get_string() {
    const auto n = get<std::uint64_t>();
    if (in.size() - pos < n) throw DataError("dataset snapshot truncated");
    std::string s = in.substr(pos, n);
    pos += n;
    return s;
  }
};

constexpr std::string_view kSnapshotMagic = "CFPXDSN1";

}  // namespace

std::string DatasetSummary::to_text() const {
  std::ostringstream os;
  os << "users: " << users << '\n'
     << "items: " << items << '\n'
     << "interactions: " << interactions << '\n'
     << "items without ratings: " << items_without_ratings << '\n'
     << "items with genres: " << items_with_genres << '\n'
     << "distinct genres: " << distinct_genres << '\n';
  return os.str();
}

DatasetSummary summarize(const InteractionDataset& dataset) {
  DatasetSummary s;
  s.users = dataset.users().size();
  s.items = dataset.items().size();
  s.interactions = dataset.interactions().size();
  const auto counts = dataset.item_counts();
  s.items_without_ratings =
      static_cast<std::size_t>(std::count(counts.begin(), counts.end(), 0));
  std::set<std::string> genres;
  for (const auto& [item, tags] : dataset.genres()) {
    if (!tags.empty()) ++s.items_with_genres;
    genres.insert(tags.begin(), tags.end());
  }
  s.distinct_genres = genres.size();
  return s;
}

std::string serialize_dataset(const InteractionDataset& dataset) {
  Writer w;
  w.out.append(kSnapshotMagic);
  w.put<double>(dataset.scale().min);
  w.put<double>(dataset.scale().max);
  w.put<std::uint64_t>(dataset.users().size());
  for (UserId u : dataset.users()) w.put<std::int64_t>(raw(u));
  w.put<std::uint64_t>(dataset.items().size());
  for (ItemId i : dataset.items()) w.put<std::int64_t>(raw(i));
  w.put<std::uint64_t>(dataset.interactions().size());
  for (const auto& row : dataset.interactions()) {
    w.put<std::int64_t>(raw(row.user));
    w.put<std::int64_t>(raw(row.item));
    w.put<double>(row.rating);
    w.put<std::int64_t>(row.timestamp);
  }
  w.put<std::uint64_t>(dataset.genres().size());
  for (const auto& [item, tags] : dataset.genres()) {
    w.put<std::int64_t>(raw(item));
    w.put<std::uint64_t>(tags.size());
    for (const auto& t : tags) w.put_string(t);
  }
  w.put<std::uint64_t>(dataset.titles().size());
  for (const auto& [item, title] : dataset.titles()) {
    w.put<std::int64_t>(raw(item));
    w.put_string(title);
  }
  return std::move(w.out);
}

InteractionDataset deserialize_dataset(const std::string& bytes) {
  if (bytes.compare(0, kSnapshotMagic.size(), kSnapshotMagic) != 0) {
    throw DataError("not a dataset snapshot");
  }
  Reader r{bytes, kSnapshotMagic.size()};
  RatingScale scale{r.get<double>(), r.get<double>()};
  std::vector<UserId> users(r.get<std::uint64_t>());
  for (auto& u : users) u = UserId{r.get<std::int64_t>()};
  std::vector<ItemId> items(r.get<std::uint64_t>());
  for (auto& i : items) i = ItemId{r.get<std::int64_t>()};
  std::vector<Interaction> rows(r.get<std::uint64_t>());
  for (auto& row : rows) {
    row.user = UserId{r.get<std::int64_t>()};
    row.item = ItemId{r.get<std::int64_t>()};
    row.rating = r.get<double>();
    row.timestamp = r.get<std::int64_t>();
  }
  GenreMap genres;
  for (auto n = r.get<std::uint64_t>(); n > 0; --n) {
    const ItemId item{r.get<std::int64_t>()};
    auto& tags = genres[item];
    tags.resize(r.get<std::uint64_t>());
    for (auto& t : tags) t = r.get_string();
  }
  TitleMap titles;
  for (auto n = r.get<std::uint64_t>(); n > 0; --n) {
    const ItemId item{r.get<std::int64_t>()};
    titles[item] = r.get_string();
  }
  if (r.pos != bytes.size()) throw DataError("trailing bytes in dataset snapshot");
  return InteractionDataset(std::move(users), std::move(items), std::move(rows),
                            std::move(genres), scale, std::move(titles));
}

PreparedSurvey prepare_survey(const InteractionDataset& base,
                              const PipelineConfig& config) {
  config.validate();
  PreparedSurvey p{
      sample_history(base, config.history_size, config.popularity_quantile,
                     config.imputed_rating, config.history_seed),
      {}, popularity_threshold(base, config.popularity_quantile),
      popular_items(base, config.popularity_quantile).size()};
  p.dataset = materialize(base, p.history);
  return p;
}

double CandidateScores::score(ScoreKind kind) const {
  switch (kind) {
    case ScoreKind::kCf: return cf.score;
    case ScoreKind::kCfApprox: return cf_approx.score;
    case ScoreKind::kItemSim: return item_sim;
    case ScoreKind::kGenreJacc: return genre_jacc;
  }
  throw std::logic_error("unknown score kind");
}

std::array<double, 4> CandidateScores::scores() const {
  return {cf.score, cf_approx.score, item_sim, genre_jacc};
}

SurveyResult run_survey(const PreparedSurvey& prepared,
                        const FactorModel& base_model,
                        const PipelineConfig& config) {
  config.validate();
  if (!(base_model.config() == config.train)) {
    throw ConfigError("checkpoint was trained with a different configuration");
  }
  const InteractionDataset& data = prepared.dataset;
  SurveyResult result;
  result.user = prepared.history.user;
  result.history = data.items_of(result.user);
  result.recommended = recommend(data, base_model, result.user);

  const CandidateSet set = enumerate_candidates(
      result.user, result.history, result.recommended, config.explanation_size);
  const std::size_t n = set.candidates.size();
  result.candidates.resize(n);
  for (std::size_t k = 0; k < n; ++k) {
    result.candidates[k].explanation = set.candidates[k];
  }

  const FullRetrainProvider full(config.train);
  const auto approx = make_provider(config.approx_strategy, config.train,
                                    config.finetune_iterations);
  const int workers = config.workers
                          ? static_cast<int>(config.workers)
                          : std::max(1, omp_get_max_threads());
  std::vector<TrainTrace> traces(2 * n);
  std::vector<std::exception_ptr> errors(n);

  auto score_all = [&](const CounterfactualProvider& provider, bool is_approx) {
    const auto start = Clock::now();
    const auto count = static_cast<std::int64_t>(n);
#pragma omp parallel for schedule(dynamic, 1) num_threads(workers)
    for (std::int64_t k = 0; k < count; ++k) {
      auto& c = result.candidates[static_cast<std::size_t>(k)];
      try {
        const auto t0 = Clock::now();
        const CfResult r = cf_score(data, base_model, c.explanation, provider,
                                    &traces[static_cast<std::size_t>(k) + (is_approx ? n : 0)]);
        (is_approx ? c.cf_approx : c.cf) = r;
        c.seconds[is_approx ? 1 : 0] = seconds_since(t0);
      } catch (...) {
        errors[static_cast<std::size_t>(k)] = std::current_exception();
      }
    }
    for (auto& e : errors) {
      if (e) std::rethrow_exception(e);
    }
    return seconds_since(start);
  };
  result.cf_seconds = score_all(full, false);
  result.approx_seconds = score_all(*approx, true);

  for (auto& c : result.candidates) {
    auto t0 = Clock::now();
    c.item_sim = item_sim(base_model, c.explanation);
    c.seconds[2] = seconds_since(t0);
    t0 = Clock::now();
    c.genre_jacc = genre_jacc(data.genres(), c.explanation);
    c.seconds[3] = seconds_since(t0);
  }

  for (const auto& trace : traces) {
    if (trace.objective.empty()) continue;
    double worst = 0.0;
    ++result.trainings_checked;
    result.monotonicity_violations += objective_increases(trace, 1e-12, &worst);
    result.worst_objective_rise = std::max(result.worst_objective_rise, worst);
  }

  std::vector<double> cf_scores, approx_scores;
  for (const auto& c : result.candidates) {
    cf_scores.push_back(c.cf.score);
    approx_scores.push_back(c.cf_approx.score);
  }
  try {
    result.spearman_cf_vs_approx = spearman(cf_scores, approx_scores);
  } catch (const DataError&) {
    result.spearman_cf_vs_approx = std::nullopt;
  }

  auto find_candidate = [&](const Explanation& e) -> CandidateScores& {
    for (auto& c : result.candidates) {
      if (c.explanation.items == e.items) return c;
    }
    throw std::logic_error("selected explanation is not a candidate");
  };

  for (ScoreKind kind : kScoreKinds) {
    SelectionTriple triple;
    if (kind == ScoreKind::kCf || kind == ScoreKind::kCfApprox) {
      std::vector<ScoredExplanation> scored;
      for (const auto& c : result.candidates) {
        scored.push_back({c.explanation, c.score(kind)});
      }
      triple = select_triple(scored, kind);
    } else {
      std::map<ItemId, double> per_item;
      for (ItemId e : result.history) {
        per_item[e] = kind == ScoreKind::kItemSim
                          ? item_cosine(base_model, e, result.recommended)
                          : genre_jaccard(data.genres(), e, result.recommended);
      }
      triple.kind = kind;
      Explanation* slots[] = {&triple.high, &triple.mean, &triple.low};
      for (std::size_t l = 0; l < kLevels.size(); ++l) {
        *slots[l] = select_baseline_items(result.user, result.recommended,
                                          result.history, per_item,
                                          config.explanation_size, kLevels[l]);
        triple.scores[l] = find_candidate(*slots[l]).score(kind);
      }
    }
    // Baseline subsets are averaged in a different order than they were
    // ranked, so allow rounding-level slack.
    constexpr double kSlack = 1e-12;
    if (!(triple.scores[0] + kSlack >= triple.scores[1] &&
          triple.scores[1] + kSlack >= triple.scores[2])) {
      throw std::logic_error("selection triple is not ordered high >= mean >= low");
    }
    const Explanation* picked[] = {&triple.high, &triple.mean, &triple.low};
    for (std::size_t l = 0; l < kLevels.size(); ++l) {
      const std::string label = std::string(to_string(kind)) + "-" +
                                std::string(to_string(kLevels[l]));
      CandidateScores& c = find_candidate(*picked[l]);
      c.labels.push_back(label);
      result.explanations.push_back(
          {label, kind, kLevels[l], *picked[l], c.scores()});
    }
    result.selections.push_back(std::move(triple));
  }
  return result;
}

std::string bundle_json(const SurveyResult& result,
                        const PreparedSurvey& prepared,
                        const PipelineConfig& config,
                        const std::string& bundle_id) {
  const InteractionDataset& data = prepared.dataset;
  Json j;
  j["schema_version"] = kBundleSchemaVersion;
  j["bundle_id"] = bundle_id;

  Json protocol;
  protocol["embedding_dim"] = config.train.embedding_dim;
  protocol["iterations"] = config.train.iterations;
  protocol["regularization"] = config.train.regularization;
  protocol["init_scale"] = config.train.init_scale;
  protocol["train_seed"] = config.train.seed;
  protocol["history_size"] = config.history_size;
  protocol["popularity_quantile"] = config.popularity_quantile;
  protocol["popularity_threshold"] = prepared.popularity_threshold;
  protocol["popular_items"] = prepared.popular_items;
  protocol["imputed_rating"] = config.imputed_rating;
  protocol["history_seed"] = config.history_seed;
  protocol["explanation_size"] = config.explanation_size;
  protocol["cf_strategy"] = to_string(CfStrategy::kFullRetrain);
  protocol["cf_approx_strategy"] = to_string(config.approx_strategy);
  protocol["finetune_iterations"] = config.finetune_iterations;
  protocol["candidates_scored"] = result.candidates.size();
  protocol["explanations"] = result.explanations.size();
  j["protocol"] = protocol;

  j["user"] = raw(result.user);
  Json history = Json::array();
  for (ItemId item : prepared.history.history) history.push_back(item_json(data, item));
  j["history"] = history;
  j["recommended"] = item_json(data, result.recommended);

  Json fidelity;
  if (result.spearman_cf_vs_approx) {
    fidelity["spearman_cf_vs_cf_approx"] = *result.spearman_cf_vs_approx;
  } else {
    fidelity["spearman_cf_vs_cf_approx"] = nullptr;
  }
  j["approximation_fidelity"] = fidelity;

  Json training;
  training["trainings_checked"] = result.trainings_checked;
  training["monotonicity_violations"] = result.monotonicity_violations;
  training["worst_relative_objective_rise"] = result.worst_objective_rise;
  j["training"] = training;

  Json selections = Json::array();
  for (const auto& t : result.selections) {
    Json s;
    s["score_kind"] = to_string(t.kind);
    s["high"] = bundle_id + "/" + std::string(to_string(t.kind)) + "-high";
    s["mean"] = bundle_id + "/" + std::string(to_string(t.kind)) + "-mean";
    s["low"] = bundle_id + "/" + std::string(to_string(t.kind)) + "-low";
    s["scores"] = t.scores;
    selections.push_back(s);
  }
  j["selections"] = selections;

  Json explanations = Json::array();
  for (const auto& e : result.explanations) {
    Json x;
    x["id"] = bundle_id + "/" + e.label;
    x["label"] = e.label;
    x["score_kind"] = to_string(e.kind);
    x["level"] = to_string(e.level);
    Json items = Json::array();
    for (ItemId item : e.explanation.items) items.push_back(item_json(data, item));
    x["items"] = items;
    Json scores;
    for (std::size_t k = 0; k < kScoreKinds.size(); ++k) {
      scores[std::string(to_string(kScoreKinds[k]))] = e.scores[k];
    }
    x["scores"] = scores;
    explanations.push_back(x);
  }
  j["explanations"] = explanations;
  return j.dump(2) + "\n";
}

std::vector<ExplanationScores> read_bundle(const std::string& json_text) {
  Json j;
  try {
    j = Json::parse(json_text);
  } catch (const nlohmann::json::exception& e) {
    throw DataError(std::string("bundle is not valid JSON: ") + e.what());
  }
  try {
    if (j.at("schema_version").get<int>() != kBundleSchemaVersion) {
      throw DataError("unsupported bundle schema version");
    }
    const std::string bundle_id = j.at("bundle_id").get<std::string>();
    std::vector<ExplanationScores> out;
    for (const auto& x : j.at("explanations")) {
      ExplanationScores e;
      e.id = x.at("id").get<std::string>();
      e.bundle_id = bundle_id;
      e.label = x.at("label").get<std::string>();
      for (std::size_t k = 0; k < kScoreKinds.size(); ++k) {
        e.scores[k] =
            x.at("scores").at(std::string(to_string(kScoreKinds[k]))).get<double>();
      }
      out.push_back(std::move(e));
    }
    return out;
  } catch (const nlohmann::json::exception& e) {
    throw DataError(std::string("malformed bundle: ") + e.what());
  }
}

std::string score_report_csv(const SurveyResult& result,
                             const PipelineConfig& config) {
  std::ostringstream os;
  os << "explanation_id,user_id,recommended_item,explaining_items,cf,cf_approx,"
        "item_sim,genre_jacc,cf_strategy,cf_approx_strategy,cf_benchmark_item,"
        "cf_approx_benchmark_item,selection_labels,cf_ms,cf_approx_ms,"
        "item_sim_ms,genre_jacc_ms\n";
  for (std::size_t k = 0; k < result.candidates.size(); ++k) {
    const auto& c = result.candidates[k];
    std::ostringstream id;
    id << 'c' << std::setw(4) << std::setfill('0') << k;
    std::string labels;
    for (const auto& l : c.labels) labels += (labels.empty() ? "" : ";") + l;
    os << id.str() << ',' << raw(result.user) << ',' << raw(result.recommended)
       << ',' << items_field(c.explanation.items) << ',' << num(c.cf.score) << ','
       << num(c.cf_approx.score) << ',' << num(c.item_sim) << ','
       << num(c.genre_jacc) << ',' << to_string(CfStrategy::kFullRetrain) << ','
       << to_string(config.approx_strategy) << ',' << raw(c.cf.benchmark_item)
       << ',' << raw(c.cf_approx.benchmark_item) << ',' << labels;
    for (double s : c.seconds) os << ',' << num(s * 1000.0);
    os << '\n';
  }
  return os.str();
}

std::string correlations_csv(const AnalysisReport& report) {
  std::ostringstream os;
  os << "score";
  for (auto dim : kDimensions) os << ',' << dim;
  os << '\n';
  for (ScoreKind kind : kScoreKinds) {
    os << to_string(kind);
    for (auto dim : kDimensions) {
      const auto& cell = report.correlations.at({kind, std::string(dim)});
      os << ',' << (cell ? num(*cell) : "NA");
    }
    os << '\n';
  }
  return os.str();
}

std::string regression_csv(const AnalysisReport& report) {
  std::ostringstream os;
  os << "score";
  for (auto dim : kDimensions) os << ',' << dim;
  os << '\n';
  for (ScoreKind kind : kScoreKinds) {
    os << to_string(kind);
    for (auto dim : kDimensions) {
      const auto& cell = report.regression.at({kind, std::string(dim)});
      os << ',' << (cell ? num(cell->test_mse) : "NA");
    }
    os << '\n';
  }
  return os.str();
}

std::string ttests_csv(const AnalysisReport& report) {
  std::ostringstream os;
  os << "comparison,dimension,n,mean_a,sd_a,mean_b,sd_b,t,p\n";
  for (const auto& cmp : default_comparisons()) {
    for (auto dim : kDimensions) {
      const auto& cell = report.ttests.at({cmp.name, std::string(dim)});
      os << cmp.name << ',' << dim << ',';
      if (cell) {
        os << cell->n << ',' << num(cell->mean_a) << ',' << num(cell->sd_a) << ','
           << num(cell->mean_b) << ',' << num(cell->sd_b) << ',' << num(cell->t)
           << ',' << num(cell->p);
      } else {
        os << "NA,NA,NA,NA,NA,NA,NA";
      }
      os << '\n';
    }
  }
  return os.str();
}

std::string report_json(const AnalysisReport& report) {
  Json j;
  j["explanations"] = report.explanations;
  j["ratings"] = report.ratings;
  Json corr, reg;
  for (ScoreKind kind : kScoreKinds) {
    const std::string k(to_string(kind));
    for (auto dim_view : kDimensions) {
      const std::string dim(dim_view);
      const auto& c = report.correlations.at({kind, dim});
      corr[k][dim] = c ? Json(*c) : Json(nullptr);
      const auto& r = report.regression.at({kind, dim});
      if (r) {
        reg[k][dim] = {{"slope", r->slope},
                       {"intercept", r->intercept},
                       {"test_mse", r->test_mse},
                       {"n_train", r->n_train},
                       {"n_test", r->n_test}};
      } else {
        reg[k][dim] = nullptr;
      }
    }
  }
  j["correlations"] = corr;
  j["regression"] = reg;
  Json tt;
  for (const auto& cmp : default_comparisons()) {
    for (auto dim_view : kDimensions) {
      const std::string dim(dim_view);
      const auto& t = report.ttests.at({cmp.name, dim});
      if (t) {
        tt[cmp.name][dim] = {{"n", t->n},         {"t", t->t},
                             {"p", t->p},         {"mean_a", t->mean_a},
                             {"sd_a", t->sd_a},   {"mean_b", t->mean_b},
                             {"sd_b", t->sd_b}};
      } else {
        tt[cmp.name][dim] = nullptr;
      }
    }
  }
  j["ttests"] = tt;
  j["notes"] = report.notes;
  return j.dump(2) + "\n";
}

std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot open " + path.string());
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

bool write_once(const std::filesystem::path& path, const std::string& bytes,
                WriteMode mode) {
  if (std::filesystem::exists(path)) {
    if (mode == WriteMode::kVerifyIdentical && read_file(path) != bytes) {
      throw DataError("refusing to overwrite " + path.string() +
                      ": existing output differs from this run");
    }
    return false;
  }
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  auto tmp = path;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw DataError("cannot write " + tmp.string());
    out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
    if (!out) throw DataError("failed writing " + tmp.string());
  }
  std::filesystem::rename(tmp, path);
  return true;
}

}  // namespace cfprox
