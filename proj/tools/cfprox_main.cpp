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

// cfprox: train a recommender, score candidate explanations and analyze
// survey ratings.
//
//   cfprox ingest   --config run.conf [--out DIR]
//   cfprox train    --config run.conf [--out DIR]
//   cfprox score    --config run.conf [--out DIR]
//   cfprox generate --config run.conf [--out DIR]
//   cfprox analyze  --config run.conf [--out DIR] [--ratings CSV] [--bundle JSON]...
//
// Exit status: 0 ok, 1 usage or config error, 2 data error, 3 numerical
// error.

#include <chrono>
#include <cstdio>
#include <filesystem>
#include <iomanip>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "cfprox/analysis.hpp"
#include "cfprox/checkpoint.hpp"
#include "cfprox/config.hpp"
#include "cfprox/dataset.hpp"
#include "cfprox/mf.hpp"
#include "cfprox/pipeline.hpp"

namespace fs = std::filesystem;
using namespace cfprox;

namespace {

struct Options {
  fs::path config_path;
  std::optional<fs::path> out;
  std::optional<fs::path> ratings;
  std::vector<fs::path> bundles;
};

PipelineConfig load(const Options& opt) {
  PipelineConfig config = load_config(opt.config_path);
  if (opt.out) config.output_dir = *opt.out;
  config.validate();
  return config;
}

struct LoadedDataset {
  InteractionDataset dataset;
  std::string hash;  // of the two input files
};

std::string input_hash(const PipelineConfig& config) {
  if (config.ratings_path.empty() || config.movies_path.empty()) {
    throw ConfigError("ratings_path and movies_path must be set");
  }
  const std::string ratings = read_file(config.ratings_path);
  const std::string movies = read_file(config.movies_path);
  std::uint64_t h = fnv1a64(ratings);
  h = fnv1a64("\x1f", h);
  h = fnv1a64(movies, h);
  return hex64(h);
}

// Parses the MovieLens files once and reuses the snapshot under
// <out>/cache afterwards.
LoadedDataset dataset_for(const PipelineConfig& config, bool verbose) {
  const std::string hash = input_hash(config);
  const fs::path snapshot = config.output_dir / "cache" / ("dataset-" + hash + ".bin");
  if (fs::exists(snapshot)) {
    if (verbose) std::cerr << "using cached dataset " << snapshot.string() << '\n';
    return {deserialize_dataset(read_file(snapshot)), hash};
  }
  InteractionDataset dataset = load_movielens(config.ratings_path, config.movies_path);
  write_once(snapshot, serialize_dataset(dataset), WriteMode::kVerifyIdentical);
  return {std::move(dataset), hash};
}

fs::path run_dir(const PipelineConfig& config, const std::string& data_hash) {
  const std::uint64_t h = fnv1a64(run_key(config), fnv1a64(data_hash));
  return config.output_dir / ("run-" + hex64(h));
}

std::string history_json(const PreparedSurvey& prepared) {
  std::ostringstream os;
  os << "{\n  \"user\": " << raw(prepared.history.user) << ",\n  \"items\": [";
  for (std::size_t k = 0; k < prepared.history.history.size(); ++k) {
    os << (k ? ", " : "") << raw(prepared.history.history[k]);
  }
  os << "],\n  \"imputed_rating\": " << prepared.history.imputed_rating
     << ",\n  \"seed\": " << prepared.history.seed
     << ",\n  \"popularity_threshold\": " << prepared.popularity_threshold
     << ",\n  \"popular_items\": " << prepared.popular_items << "\n}\n";
  return os.str();
}

std::string train_log_csv(const TrainTrace& trace) {
  std::ostringstream os;
  os << "half_sweep,objective\n" << std::setprecision(17);
  for (std::size_t k = 0; k < trace.objective.size(); ++k) {
    os << k << ',' << trace.objective[k] << '\n';
  }
  return os.str();
}

int cmd_ingest(const Options& opt) {
  const PipelineConfig config = load(opt);
  const LoadedDataset data = dataset_for(config, true);
  const std::string text = summarize(data.dataset).to_text();
  write_once(config.output_dir / "cache" / ("summary-" + data.hash + ".txt"), text,
             WriteMode::kVerifyIdentical);
  std::cout << text;
  return 0;
}

int cmd_train(const Options& opt) {
  const PipelineConfig config = load(opt);
  const LoadedDataset data = dataset_for(config, true);
  const fs::path dir = run_dir(config, data.hash);
  const PreparedSurvey prepared = prepare_survey(data.dataset, config);
  std::cerr << "training d=" << config.train.embedding_dim << " for "
            << config.train.iterations << " iterations on "
            << prepared.dataset.interactions().size() << " interactions\n";
  TrainTrace trace;
  const FactorModel model = train(prepared.dataset, config.train, &trace);
  double worst = 0.0;
  const std::size_t rises = objective_increases(trace, 1e-12, &worst);
  for (std::size_t k = 0; k < trace.objective.size(); ++k) {
    std::cerr << "  half-sweep " << k << "  objective " << std::setprecision(12)
              << trace.objective[k] << '\n';
  }
  if (rises) {
    std::cerr << "warning: objective rose at " << rises
              << " half-sweeps (worst relative rise " << worst << ")\n";
  }
  write_once(dir / "config.txt", run_key(config), WriteMode::kVerifyIdentical);
  write_once(dir / "history.json", history_json(prepared), WriteMode::kVerifyIdentical);
  write_once(dir / "train_log.csv", train_log_csv(trace), WriteMode::kVerifyIdentical);
  write_once(dir / "model.ckpt", serialize_checkpoint(model), WriteMode::kVerifyIdentical);
  std::cout << (dir / "model.ckpt").string() << '\n';
  return 0;
}

struct ScoredRun {
  PipelineConfig config;
  fs::path dir;
  PreparedSurvey prepared;
  SurveyResult result;
};

ScoredRun score_run(const Options& opt) {
  const PipelineConfig config = load(opt);
  const LoadedDataset data = dataset_for(config, false);
  const fs::path dir = run_dir(config, data.hash);
  if (!fs::exists(dir / "model.ckpt")) {
    throw DataError("no checkpoint at " + (dir / "model.ckpt").string() +
                    "; run `cfprox train` with this config first");
  }
  const FactorModel model = load_checkpoint(dir / "model.ckpt");
  PreparedSurvey prepared = prepare_survey(data.dataset, config);
  std::cerr << "scoring candidates for user " << raw(prepared.history.user) << '\n';
  SurveyResult result = run_survey(prepared, model, config);
  std::cerr << result.candidates.size() << " candidates scored; CF "
            << result.cf_seconds << " s, CF^A " << result.approx_seconds << " s\n";
  write_once(dir / "score_report.csv", score_report_csv(result, config),
             WriteMode::kKeepExisting);
  return {config, dir, std::move(prepared), std::move(result)};
}

int cmd_score(const Options& opt) {
  const ScoredRun run = score_run(opt);
  std::cout << (run.dir / "score_report.csv").string() << '\n';
  return 0;
}

int cmd_generate(const Options& opt) {
  const ScoredRun run = score_run(opt);
  const std::string bundle_id = run.dir.filename().string();
  write_once(run.dir / "bundle.json",
             bundle_json(run.result, run.prepared, run.config, bundle_id),
             WriteMode::kVerifyIdentical);
  if (run.result.spearman_cf_vs_approx) {
    std::cerr << "spearman(CF, CF^A) = " << *run.result.spearman_cf_vs_approx << '\n';
  }
  std::cout << (run.dir / "bundle.json").string() << '\n';
  return 0;
}

int cmd_analyze(const Options& opt) {
  const PipelineConfig config = load(opt);
  const fs::path ratings_path = opt.ratings ? *opt.ratings : config.survey_ratings_path;
  const std::vector<fs::path> bundle_paths =
      opt.bundles.empty() ? config.bundle_paths : opt.bundles;
  if (ratings_path.empty()) throw ConfigError("no ratings file (--ratings)");
  if (bundle_paths.empty()) throw ConfigError("no bundles (--bundle)");

  std::uint64_t h = fnv1a64(read_file(ratings_path));
  std::vector<ExplanationScores> explanations;
  for (const auto& path : bundle_paths) {
    const std::string text = read_file(path);
    h = fnv1a64(text, h);
    for (auto& e : read_bundle(text)) explanations.push_back(std::move(e));
  }
  std::ostringstream split;
  split << config.split_seed << '/' << config.train_fraction;
  h = fnv1a64(split.str(), h);

  const RatingTable table = load_rating_table(ratings_path);
  const AnalysisReport report =
      build_report(explanations, table, {config.train_fraction, config.split_seed});
  for (const auto& note : report.notes) std::cerr << "note: " << note << '\n';

  // Everything is rendered before the first file is written.
  const std::string files[4][2] = {
      {"correlations.csv", correlations_csv(report)},
      {"mse.csv", regression_csv(report)},
      {"ttests.csv", ttests_csv(report)},
      {"report.json", report_json(report)},
  };
  const fs::path dir = config.output_dir / ("analysis-" + hex64(h));
  for (const auto& [name, bytes] : files) {
    write_once(dir / name, bytes, WriteMode::kVerifyIdentical);
  }
  std::cout << dir.string() << '\n';
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Counterfactual Proximity evaluation of recommendation explanations"};
  app.require_subcommand(1);
  Options opt;
  std::string out;

  auto add_common = [&](CLI::App* sub) {
    sub->add_option("--config", opt.config_path, "pipeline config file")
        ->required()
        ->check(CLI::ExistingFile);
    sub->add_option_function<std::string>(
        "--out", [&](const std::string& v) { opt.out = fs::path(v); },
        "output root (overrides output_dir)");
  };
  auto* ingest = app.add_subcommand("ingest", "parse, validate and summarize the dataset");
  auto* train_cmd = app.add_subcommand("train", "train the base model and write a checkpoint");
  auto* score = app.add_subcommand("score", "score every candidate explanation");
  auto* generate = app.add_subcommand("generate", "emit the survey bundle");
  auto* analyze = app.add_subcommand("analyze", "correlate scores with survey ratings");
  for (auto* sub : {ingest, train_cmd, score, generate, analyze}) add_common(sub);
  analyze->add_option_function<std::string>(
      "--ratings", [&](const std::string& v) { opt.ratings = fs::path(v); },
      "survey ratings CSV");
  analyze->add_option("--bundle", opt.bundles, "survey bundle JSON (repeatable)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 1;
  }

  try {
    if (*ingest) return cmd_ingest(opt);
    if (*train_cmd) return cmd_train(opt);
    if (*score) return cmd_score(opt);
    if (*generate) return cmd_generate(opt);
    if (*analyze) return cmd_analyze(opt);
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return 1;
  } catch (const DataError& e) {
    std::cerr << "data error: " << e.what() << '\n';
    return 2;
  } catch (const fs::filesystem_error& e) {
    std::cerr << "data error: " << e.what() << '\n';
    return 2;
  } catch (const NumericalError& e) {
    std::cerr << "numerical error: " << e.what() << '\n';
    return 3;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 1;
}
