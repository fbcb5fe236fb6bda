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

#include <gtest/gtest.h>

#include "cfprox/config.hpp"
#include "support.hpp"

namespace cfprox {
namespace {

TEST(Config, DefaultsFollowTheSurveyProtocol) {
  const auto c = parse_config("");
  EXPECT_EQ(c.train.embedding_dim, 40u);
  EXPECT_EQ(c.train.iterations, 20u);
  EXPECT_EQ(c.history_size, 9u);
  EXPECT_EQ(c.popularity_quantile, 0.9);
  EXPECT_EQ(c.explanation_size, 3u);
  EXPECT_EQ(c.finetune_iterations, 5u);
  EXPECT_EQ(c.imputed_rating, 4.0);
  EXPECT_EQ(c.approx_strategy, CfStrategy::kWarmStartFinetune);
  EXPECT_EQ(c.workers, 0u);
}

TEST(Config, ParsesKeysCommentsAndPaths) {
  const auto c = parse_config(
      "# experiment\n"
      "ratings_path = data/ratings.csv   # relative\n"
      "movies_path=/abs/movies.csv\n"
      "\n"
      "embedding_dim = 8\n"
      "train_seed = 99\n"
      "approx_strategy = full-retrain\n"
      "bundle_paths = a.json, b/c.json\n",
      "/cfg/dir");
  EXPECT_EQ(c.ratings_path, "/cfg/dir/data/ratings.csv");
  EXPECT_EQ(c.movies_path, "/abs/movies.csv");
  EXPECT_EQ(c.train.embedding_dim, 8u);
  EXPECT_EQ(c.train.seed, 99u);
  EXPECT_EQ(c.approx_strategy, CfStrategy::kFullRetrain);
  ASSERT_EQ(c.bundle_paths.size(), 2u);
  EXPECT_EQ(c.bundle_paths[1], "/cfg/dir/b/c.json");
}

TEST(Config, RejectsMistakes) {
  EXPECT_THROW(parse_config("embeding_dim = 8\n"), ConfigError);
  EXPECT_THROW(parse_config("iterations = 3\niterations = 4\n"), ConfigError);
  EXPECT_THROW(parse_config("iterations\n"), ConfigError);
  EXPECT_THROW(parse_config("iterations = -1\n"), ConfigError);
  EXPECT_THROW(parse_config("regularization = abc\n"), ConfigError);
  EXPECT_THROW(parse_config("explanation_size = 10\n"), ConfigError);
  EXPECT_THROW(parse_config("popularity_quantile = 1.5\n"), ConfigError);
  EXPECT_THROW(parse_config("approx_strategy = sgd\n"), ConfigError);
  EXPECT_THROW(parse_config("train_fraction = 1\n"), ConfigError);
  try {
    parse_config("\n\nbogus = 1\n");
    FAIL();
  } catch (const ConfigError& e) {
    EXPECT_NE(std::string(e.what()).find("line 3"), std::string::npos);
  }
  EXPECT_THROW(load_config("/nonexistent/run.conf"), ConfigError);
}

TEST(Config, FormatRoundTrips) {
  const auto c = parse_config(
      "ratings_path = /r.csv\nmovies_path = /m.csv\nregularization = 0.125\n"
      "history_size = 6\nexplanation_size = 2\nworkers = 3\nbundle_paths = /x.json\n");
  const auto back = parse_config(format_config(c));
  EXPECT_EQ(format_config(back), format_config(c));
  EXPECT_EQ(back.train, c.train);
  EXPECT_EQ(back.bundle_paths, c.bundle_paths);
}

TEST(Config, RunKeyTracksModelKeysOnly) {
  const auto base = parse_config("");
  EXPECT_EQ(run_key(parse_config("workers = 4\noutput_dir = /elsewhere\n")), run_key(base));
  EXPECT_NE(run_key(parse_config("train_seed = 2\n")), run_key(base));
  EXPECT_NE(run_key(parse_config("history_seed = 8\n")), run_key(base));
  EXPECT_NE(run_key(parse_config("approx_strategy = full-retrain\n")), run_key(base));
  EXPECT_EQ(hex64(fnv1a64("")), "cbf29ce484222325");
  EXPECT_EQ(hex64(fnv1a64("a")), "af63dc4c8601ec8c");
}

}  // namespace
}  // namespace cfprox
