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

#include "cfprox/config.hpp"

#include <cmath>
#include <fstream>
#include <functional>
#include <iomanip>
#include <map>
#include <set>
#include <sstream>

#include "csv.hpp"

namespace cfprox {
namespace {

std::string trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r");
  return std::string(s.substr(first, last - first + 1));
}

std::string fmt(double v) {
  std::ostringstream os;
  os << std::setprecision(17) << v;
  return os.str();
}

using Setter = std::function<void(PipelineConfig&, const std::string&,
                                  const std::filesystem::path&)>;

std::uint64_t to_u64(const std::string& v) {
  std::int64_t x = 0;
  if (!csv::parse_int(v, x) || x < 0) {
    throw ConfigError("expected a non-negative integer, got `" + v + "`");
  }
  return static_cast<std::uint64_t>(x);
}

double to_double(const std::string& v) {
  double x = 0.0;
  if (!csv::parse_double(v, x)) throw ConfigError("expected a number, got `" + v + "`");
  return x;
}

std::filesystem::path to_path(const std::string& v,
                              const std::filesystem::path& base) {
  std::filesystem::path p(v);
  if (p.is_relative() && !base.empty()) p = base / p;
  return p.lexically_normal();
}

const std::map<std::string, Setter>& schema() {
  static const std::map<std::string, Setter> keys = {
      {"ratings_path", [](auto& c, auto& v, auto& b) { c.ratings_path = to_path(v, b); }},
      {"movies_path", [](auto& c, auto& v, auto& b) { c.movies_path = to_path(v, b); }},
      {"output_dir", [](auto& c, auto& v, auto& b) { c.output_dir = to_path(v, b); }},
      {"embedding_dim", [](auto& c, auto& v, auto&) { c.train.embedding_dim = to_u64(v); }},
      {"iterations", [](auto& c, auto& v, auto&) { c.train.iterations = to_u64(v); }},
      {"regularization", [](auto& c, auto& v, auto&) { c.train.regularization = to_double(v); }},
      {"init_scale", [](auto& c, auto& v, auto&) { c.train.init_scale = to_double(v); }},
      {"train_seed", [](auto& c, auto& v, auto&) { c.train.seed = to_u64(v); }},
      {"history_size", [](auto& c, auto& v, auto&) { c.history_size = to_u64(v); }},
      {"popularity_quantile", [](auto& c, auto& v, auto&) { c.popularity_quantile = to_double(v); }},
      {"imputed_rating", [](auto& c, auto& v, auto&) { c.imputed_rating = to_double(v); }},
      {"history_seed", [](auto& c, auto& v, auto&) { c.history_seed = to_u64(v); }},
      {"explanation_size", [](auto& c, auto& v, auto&) { c.explanation_size = to_u64(v); }},
      {"finetune_iterations", [](auto& c, auto& v, auto&) { c.finetune_iterations = to_u64(v); }},
      {"approx_strategy", [](auto& c, auto& v, auto&) { c.approx_strategy = parse_strategy(v); }},
      {"workers", [](auto& c, auto& v, auto&) { c.workers = to_u64(v); }},
      {"split_seed", [](auto& c, auto& v, auto&) { c.split_seed = to_u64(v); }},
      {"train_fraction", [](auto& c, auto& v, auto&) { c.train_fraction = to_double(v); }},
      {"survey_ratings_path", [](auto& c, auto& v, auto& b) { c.survey_ratings_path = to_path(v, b); }},
      {"bundle_paths",
       [](auto& c, auto& v, auto& b) {
         c.bundle_paths.clear();
         std::istringstream in(v);
         std::string part;
         while (std::getline(in, part, ',')) {
           part = trim(part);
           if (!part.empty()) c.bundle_paths.push_back(to_path(part, b));
         }
       }},
  };
  return keys;
}

}  // namespace

void PipelineConfig::validate() const {
  train.validate();
  if (history_size < 1) throw ConfigError("history_size must be >= 1");
  if (explanation_size < 1 || explanation_size > history_size) {
    throw ConfigError("explanation_size must lie in [1, history_size]");
  }
  if (!(popularity_quantile >= 0.0 && popularity_quantile <= 1.0)) {
    throw ConfigError("popularity_quantile must lie in [0, 1]");
  }
  if (!(imputed_rating >= 0.5 && imputed_rating <= 5.0)) {
    throw ConfigError("imputed_rating must lie on the rating scale [0.5, 5]");
  }
  if (finetune_iterations < 1) throw ConfigError("finetune_iterations must be >= 1");
  if (!(train_fraction > 0.0 && train_fraction < 1.0)) {
    throw ConfigError("train_fraction must lie in (0, 1)");
  }
}

PipelineConfig parse_config(std::string_view text,
                            const std::filesystem::path& base_dir) {
  PipelineConfig config;
  std::set<std::string> seen;
  std::istringstream in{std::string(text)};
  std::string line;
  for (std::size_t line_no = 1; std::getline(in, line); ++line_no) {
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    const std::string body = trim(line);
    if (body.empty()) continue;
    const auto eq = body.find('=');
    const std::string where = "config line " + std::to_string(line_no) + ": ";
    if (eq == std::string::npos) throw ConfigError(where + "expected `key = value`");
    const std::string key = trim(std::string_view(body).substr(0, eq));
    const std::string value = trim(std::string_view(body).substr(eq + 1));
    auto it = schema().find(key);
    if (it == schema().end()) throw ConfigError(where + "unknown key `" + key + "`");
    if (!seen.insert(key).second) throw ConfigError(where + "repeated key `" + key + "`");
    try {
      it->second(config, value, base_dir);
    } catch (const ConfigError& e) {
      throw ConfigError(where + key + ": " + e.what());
    }
  }
  config.validate();
  return config;
}

PipelineConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError("cannot open config " + path.string());
  std::stringstream buf;
  buf << in.rdbuf();
  return parse_config(buf.str(), path.parent_path());
}

std::string run_key(const PipelineConfig& c) {
  std::ostringstream os;
  os << "embedding_dim = " << c.train.embedding_dim << '\n'
     << "iterations = " << c.train.iterations << '\n'
     << "regularization = " << fmt(c.train.regularization) << '\n'
     << "init_scale = " << fmt(c.train.init_scale) << '\n'
     << "train_seed = " << c.train.seed << '\n'
     << "history_size = " << c.history_size << '\n'
     << "popularity_quantile = " << fmt(c.popularity_quantile) << '\n'
     << "imputed_rating = " << fmt(c.imputed_rating) << '\n'
     << "history_seed = " << c.history_seed << '\n'
     << "explanation_size = " << c.explanation_size << '\n'
     << "finetune_iterations = " << c.finetune_iterations << '\n'
     << "approx_strategy = " << to_string(c.approx_strategy) << '\n';
  return os.str();
}

std::string format_config(const PipelineConfig& c) {
  std::ostringstream os;
  os << "ratings_path = " << c.ratings_path.string() << '\n'
     << "movies_path = " << c.movies_path.string() << '\n'
     << "output_dir = " << c.output_dir.string() << '\n'
     << run_key(c) << "workers = " << c.workers << '\n'
     << "split_seed = " << c.split_seed << '\n'
     << "train_fraction = " << fmt(c.train_fraction) << '\n'
     << "survey_ratings_path = " << c.survey_ratings_path.string() << '\n'
     << "bundle_paths = ";
  for (std::size_t k = 0; k < c.bundle_paths.size(); ++k) {
    os << (k ? ", " : "") << c.bundle_paths[k].string();
  }
  os << '\n';
  return os.str();
}

std::uint64_t fnv1a64(std::string_view bytes, std::uint64_t seed) {
  std::uint64_t h = seed;
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

std::string hex64(std::uint64_t value) {
  std::ostringstream os;
  os << std::hex << std::setw(16) << std::setfill('0') << value;
  return os.str();
}

}  // namespace cfprox
