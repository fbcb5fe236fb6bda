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

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

#include "cfprox/counterfactual.hpp"
#include "cfprox/mf.hpp"

namespace cfprox {

// Experiment configuration. Defaults reproduce the survey-generation
// protocol: 9-item histories drawn above the 0.9 popularity quantile,
// 3-item explanations, d = 40, 20 ALS iterations and a 5-pass warm-start
// finetune.
//
// File format: one `key = value` per line, `#` starts a comment, blank lines
// are ignored. Unknown or repeated keys are errors. Relative paths resolve
// against the config file's directory.
//
//   ratings_path, movies_path        MovieLens CSV inputs
//   output_dir                       root for run directories
//   embedding_dim, iterations        ALS shape
//   regularization, init_scale       ALS objective / initialisation
//   train_seed                       factor initialisation seed
//   history_size, popularity_quantile, imputed_rating, history_seed
//   explanation_size
//   finetune_iterations              warm-start passes for the CF^A column
//   approx_strategy                  warm-start-finetune | full-retrain
//   workers                          0 = all hardware threads
//   split_seed, train_fraction       regression hold-out split
//   survey_ratings_path              answers CSV for `analyze`
//   bundle_paths                     comma-separated bundles for `analyze`
struct PipelineConfig {
  std::filesystem::path ratings_path;
  std::filesystem::path movies_path;
  std::filesystem::path output_dir = "cfprox-out";
  TrainConfig train;
  std::size_t history_size = 9;
  double popularity_quantile = 0.9;
  double imputed_rating = 4.0;
  std::uint64_t history_seed = 7;
  std::size_t explanation_size = 3;
  std::size_t finetune_iterations = 5;
  CfStrategy approx_strategy = CfStrategy::kWarmStartFinetune;
  std::size_t workers = 0;
  std::uint64_t split_seed = 11;
  double train_fraction = 0.7;
  std::filesystem::path survey_ratings_path;
  std::vector<std::filesystem::path> bundle_paths;

  // Throws ConfigError.
  void validate() const;
};

// Throws ConfigError naming the offending line.
PipelineConfig parse_config(std::string_view text,
                            const std::filesystem::path& base_dir = {});
PipelineConfig load_config(const std::filesystem::path& path);

// Every key in canonical `key = value` form, defaults included.
std::string format_config(const PipelineConfig& config);

// Canonical text of the keys that determine the trained model and survey
// bundle. Two configs with equal run keys produce identical artifacts.
std::string run_key(const PipelineConfig& config);

std::uint64_t fnv1a64(std::string_view bytes, std::uint64_t seed = 0xcbf29ce484222325ULL);
std::string hex64(std::uint64_t value);

}  // namespace cfprox
