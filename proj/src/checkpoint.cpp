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

#include "cfprox/checkpoint.hpp"

#include <bit>
#include <cstring>
#include <fstream>
#include <iterator>
#include <string_view>

namespace cfprox {
namespace {

static_assert(std::endian::native == std::endian::little,
              "checkpoint I/O assumes a little-endian host");

constexpr std::string_view kMagic = "CFPXCKPT";

template <typename T>
void put(std::string& out, T value) {
  char buf[sizeof(T)];
  std::memcpy(buf, &value, sizeof(T));
  out.append(buf, sizeof(T));
}

class Reader {
 public:
  explicit Reader(const std::string& bytes) : bytes_(bytes) {}

  template <typename T>
  T get() {
    if (bytes_.size() - pos_ < sizeof(T)) {
      throw DataError("checkpoint truncated at byte " + std::to_string(pos_));
    }
    T value;
    std::memcpy(&value, bytes_.data() + pos_, sizeof(T));
    pos_ += sizeof(T);
    return value;
  }

  void read_doubles(double* dst, std::size_t n) {
    if ((bytes_.size() - pos_) / sizeof(double) < n) {
      throw DataError("checkpoint truncated at byte " + std::to_string(pos_));
    }
    std::memcpy(dst, bytes_.data() + pos_, n * sizeof(double));
    pos_ += n * sizeof(double);
  }

  bool done() const { return pos_ == bytes_.size(); }

 private:
  const std::string& bytes_;
  std::size_t pos_ = 0;
};

}  // namespace

std::string serialize_checkpoint(const FactorModel& model) {
  std::string out;
  const auto& config = model.config();
  out.reserve(64 + 8 * (model.users().size() + model.items().size()) *
                       (1 + model.dim()));
  out.append(kMagic);
  put<std::uint32_t>(out, kCheckpointVersion);
  put<std::uint32_t>(out, static_cast<std::uint32_t>(model.dim()));
  put<std::uint64_t>(out, model.users().size());
  put<std::uint64_t>(out, model.items().size());
  put<std::uint64_t>(out, config.iterations);
  put<double>(out, config.regularization);
  put<double>(out, config.init_scale);
  put<std::uint64_t>(out, config.seed);
  for (UserId u : model.users()) put<std::int64_t>(out, raw(u));
  for (ItemId i : model.items()) put<std::int64_t>(out, raw(i));
  out.append(reinterpret_cast<const char*>(model.user_factors().data()),
             sizeof(double) * static_cast<std::size_t>(model.user_factors().size()));
  out.append(reinterpret_cast<const char*>(model.item_factors().data()),
             sizeof(double) * static_cast<std::size_t>(model.item_factors().size()));
  return out;
}

FactorModel deserialize_checkpoint(const std::string& bytes) {
  if (bytes.compare(0, kMagic.size(), kMagic) != 0) {
    throw DataError("not a cfprox checkpoint (bad magic)");
  }
  Reader in(bytes);
  for (std::size_t k = 0; k < kMagic.size(); ++k) in.get<char>();
  const auto version = in.get<std::uint32_t>();
  if (version != kCheckpointVersion) {
    throw DataError("unsupported checkpoint version " + std::to_string(version));
  }
  TrainConfig config;
  config.embedding_dim = in.get<std::uint32_t>();
  const auto n_users = in.get<std::uint64_t>();
  const auto n_items = in.get<std::uint64_t>();
  config.iterations = in.get<std::uint64_t>();
  config.regularization = in.get<double>();
  config.init_scale = in.get<double>();
  config.seed = in.get<std::uint64_t>();

  const std::size_t expected =
      64 + 8 * (n_users + n_items) * (1 + config.embedding_dim);
  if (bytes.size() != expected) {
    throw DataError("checkpoint size " + std::to_string(bytes.size()) +
                    " does not match header (expected " +
                    std::to_string(expected) + ")");
  }
  std::vector<UserId> users(n_users);
  std::vector<ItemId> items(n_items);
  for (auto& u : users) u = UserId{in.get<std::int64_t>()};
  for (auto& i : items) i = ItemId{in.get<std::int64_t>()};
  const auto d = static_cast<Eigen::Index>(config.embedding_dim);
  FactorMatrix p(static_cast<Eigen::Index>(n_users), d);
  FactorMatrix q(static_cast<Eigen::Index>(n_items), d);
  in.read_doubles(p.data(), static_cast<std::size_t>(p.size()));
  in.read_doubles(q.data(), static_cast<std::size_t>(q.size()));
  return FactorModel(std::move(users), std::move(items), std::move(p),
                     std::move(q), config);
}

void save_checkpoint(const FactorModel& model, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw DataError("cannot write checkpoint " + path.string());
  const std::string bytes = serialize_checkpoint(model);
  out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
  if (!out) throw DataError("failed writing checkpoint " + path.string());
}

FactorModel load_checkpoint(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot open checkpoint " + path.string());
  std::string bytes((std::istreambuf_iterator<char>(in)),
                    std::istreambuf_iterator<char>());
  return deserialize_checkpoint(bytes);
}

}  // namespace cfprox
