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

#include <sys/wait.h>

#include <cmath>
#include <cstdio>
#include <fstream>
#include <numeric>
#include <sstream>

#include "cfprox/pipeline.hpp"
#include "json.hpp"
#include "support.hpp"

namespace cfprox {
namespace {

namespace fs = std::filesystem;
using testing::TempDir;
using testing::write_text;

struct Outcome {
  int code;
  std::string out;
};

Outcome sh(const std::string& cmd) {
  Outcome o{-1, {}};
  FILE* pipe = popen((cmd + " 2>/dev/null").c_str(), "r");
  if (!pipe) return o;
  char buf[4096];
  while (std::size_t n = fread(buf, 1, sizeof buf, pipe)) o.out.append(buf, n);
  const int status = pclose(pipe);
  o.code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  return o;
}

std::string cli(const std::string& args) { return std::string(CFPROX_CLI) + " " + args; }

std::string trim(std::string s) {
  while (!s.empty() && (s.back() == '\n' || s.back() == '\r')) s.pop_back();
  return s;
}

class Cli : public ::testing::Test {
 protected:
  static void SetUpTestSuite() {
    dir_ = new TempDir("cli");
    const auto data = dir_->path() / "data";
    ASSERT_EQ(sh(std::string(CFPROX_SYNTH) + " --out " + data.string() +
                 " --users 60 --items 120 --ratings 1800 --min-per-user 10")
                  .code,
              0);
    write_text(dir_->path() / "run.conf",
               "ratings_path = data/ratings.csv\n"
               "movies_path = data/movies.csv\n"
               "embedding_dim = 6\niterations = 6\n"
               "history_size = 6\nexplanation_size = 2\n"
               "popularity_quantile = 0.8\nworkers = 2\n");
  }
  static void TearDownTestSuite() { delete dir_; }

  static fs::path root() { return dir_->path(); }
  static std::string conf() { return (root() / "run.conf").string(); }

  static TempDir* dir_;
};
TempDir* Cli::dir_ = nullptr;

TEST_F(Cli, IngestSummaryIsStable) {
  const auto out = (root() / "ingest").string();
  const auto a = sh(cli("ingest --config " + conf() + " --out " + out));
  ASSERT_EQ(a.code, 0);
  EXPECT_NE(a.out.find("users: 60"), std::string::npos);
  EXPECT_NE(a.out.find("interactions: 1800"), std::string::npos);
  const auto b = sh(cli("ingest --config " + conf() + " --out " + out));
  EXPECT_EQ(b.code, 0);
  EXPECT_EQ(a.out, b.out);
}

TEST_F(Cli, ExitCodes) {
  EXPECT_EQ(sh(cli("")).code, 1);
  EXPECT_EQ(sh(cli("ingest --config " + (root() / "nope.conf").string())).code, 1);
  write_text(root() / "typo.conf", "ratings_pth = x\n");
  EXPECT_EQ(sh(cli("ingest --config " + (root() / "typo.conf").string())).code, 1);
  write_text(root() / "missing.conf",
             "ratings_path = nowhere/ratings.csv\nmovies_path = nowhere/movies.csv\n");
  EXPECT_EQ(sh(cli("ingest --config " + (root() / "missing.conf").string() + " --out " +
                   (root() / "x").string()))
                .code,
            2);
  fs::create_directories(root() / "bad");
  write_text(root() / "bad" / "ratings.csv", "userId,movieId,rating,timestamp\n1,1,oops,0\n");
  write_text(root() / "bad" / "movies.csv", "movieId,title,genres\n1,A,Drama\n");
  write_text(root() / "bad.conf",
             "ratings_path = bad/ratings.csv\nmovies_path = bad/movies.csv\n");
  EXPECT_EQ(sh(cli("ingest --config " + (root() / "bad.conf").string() + " --out " +
                   (root() / "x").string()))
                .code,
            2);
  EXPECT_EQ(sh(cli("generate --config " + conf() + " --out " + (root() / "fresh").string()))
                .code,
            2);
}

TEST_F(Cli, TrainGenerateAnalyze) {
  const auto out = (root() / "pipeline").string();
  const auto t1 = sh(cli("train --config " + conf() + " --out " + out));
  ASSERT_EQ(t1.code, 0);
  const fs::path ckpt = trim(t1.out);
  const std::string model = read_file(ckpt);
  // A second run retrains and must reproduce the checkpoint byte for byte.
  const auto t2 = sh(cli("train --config " + conf() + " --out " + out));
  ASSERT_EQ(t2.code, 0);
  EXPECT_EQ(trim(t2.out), ckpt.string());
  EXPECT_EQ(read_file(ckpt), model);
  std::ifstream log(ckpt.parent_path() / "train_log.csv");
  std::string header;
  std::getline(log, header);
  EXPECT_EQ(header, "half_sweep,objective");

  const auto g1 = sh(cli("generate --config " + conf() + " --out " + out));
  ASSERT_EQ(g1.code, 0);
  const fs::path bundle = trim(g1.out);
  const std::string bytes = read_file(bundle);
  const auto g2 = sh(cli("generate --config " + conf() + " --out " + out));
  ASSERT_EQ(g2.code, 0);
  EXPECT_EQ(read_file(bundle), bytes);
  const auto j = nlohmann::json::parse(bytes);
  EXPECT_EQ(j["explanations"].size(), 12u);
  EXPECT_EQ(j["protocol"]["candidates_scored"], 15);
  EXPECT_TRUE(fs::exists(bundle.parent_path() / "score_report.csv"));

  // Survey answers follow the CF score on the 1..5 scale.
  std::ostringstream ratings;
  ratings << "question_id,explanation_id,dimension,participant_id,rating\n";
  std::vector<double> xs, ys;
  for (const auto& e : read_bundle(bytes)) {
    const int r = 1 + static_cast<int>(std::lround(2.0 * (e.scores[0] + 1.0)));
    xs.push_back(e.scores[0]);
    ys.push_back(r);
    for (auto dim : kDimensions) {
      ratings << "q," << e.id << ',' << dim << ",p1," << r << '\n';
    }
  }
  // Two-pass Pearson as the reference value.
  const double mx = std::accumulate(xs.begin(), xs.end(), 0.0) / xs.size();
  const double my = std::accumulate(ys.begin(), ys.end(), 0.0) / ys.size();
  double sxy = 0, sxx = 0, syy = 0;
  for (std::size_t k = 0; k < xs.size(); ++k) {
    sxy += (xs[k] - mx) * (ys[k] - my);
    sxx += (xs[k] - mx) * (xs[k] - mx);
    syy += (ys[k] - my) * (ys[k] - my);
  }
  ASSERT_GT(syy, 0.0);
  const double expected = sxy / std::sqrt(sxx * syy);
  const fs::path answers = root() / "answers.csv";
  write_text(answers, ratings.str());
  const auto a = sh(cli("analyze --config " + conf() + " --out " + out + " --ratings " +
                        answers.string() + " --bundle " + bundle.string()));
  ASSERT_EQ(a.code, 0);
  const fs::path report = trim(a.out);
  const std::string corr = read_file(report / "correlations.csv");
  EXPECT_EQ(std::count(corr.begin(), corr.end(), '\n'), 5);
  EXPECT_EQ(corr.substr(0, corr.find('\n')),
            "score,Explainability,Informativeness,Effectiveness,Persuasiveness,"
            "Transparency,Trustworthiness,Satisfaction");
  const std::string cf_row = corr.substr(corr.find("\ncf,") + 1);
  std::istringstream cells(cf_row.substr(0, cf_row.find('\n')));
  std::string cell;
  std::getline(cells, cell, ',');
  EXPECT_EQ(cell, "cf");
  int dims = 0;
  while (std::getline(cells, cell, ',')) {
    EXPECT_NEAR(std::stod(cell), expected, 1e-8);
    ++dims;
  }
  EXPECT_EQ(dims, 7);
  EXPECT_TRUE(fs::exists(report / "mse.csv"));
  EXPECT_TRUE(fs::exists(report / "ttests.csv"));
  EXPECT_TRUE(fs::exists(report / "report.json"));

  // Unknown explanation ids and empty tables fail without writing anything.
  write_text(root() / "stray.csv",
             "question_id,explanation_id,dimension,participant_id,rating\n"
             "q,ghost/cf-high,Satisfaction,p1,3\n");
  const auto stray = sh(cli("analyze --config " + conf() + " --out " + out + " --ratings " +
                            (root() / "stray.csv").string() + " --bundle " + bundle.string()));
  EXPECT_EQ(stray.code, 2);
  write_text(root() / "empty.csv", "");
  const auto empty = sh(cli("analyze --config " + conf() + " --out " + out + " --ratings " +
                            (root() / "empty.csv").string() + " --bundle " + bundle.string()));
  EXPECT_EQ(empty.code, 2);
  std::size_t analyses = 0;
  for (const auto& entry : fs::directory_iterator(out)) {
    if (entry.path().filename().string().rfind("analysis-", 0) == 0) ++analyses;
  }
  EXPECT_EQ(analyses, 1u);
}

}  // namespace
}  // namespace cfprox
