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

#include <filesystem>
#include <string>

#include "cfprox/mf.hpp"

namespace cfprox {

// Binary checkpoint, little-endian, version 1:
//
//   offset  size  field
//   0       8     magic "CFPXCKPT"
//   8       4     u32 format version (1)
//   12      4     u32 embedding dim d
//   16      8     u64 user count U
//   24      8     u64 item count I
//   32      8     u64 iterations            (config echo)
//   40      8     f64 regularization        (config echo)
//   48      8     f64 init_scale            (config echo)
//   56      8     u64 seed                  (config echo)
//   64      8*U   i64 user ids, ascending
//   ...     8*I   i64 item ids, ascending
//   ...     8*U*d f64 user factors, row-major
//   ...     8*I*d f64 item factors, row-major
//
// Doubles are stored as raw IEEE-754 bits, so a save/load round trip is
// bit-exact.
inline constexpr std::uint32_t kCheckpointVersion = 1;

std::string serialize_checkpoint(const FactorModel& model);
FactorModel deserialize_checkpoint(const std::string& bytes);

void save_checkpoint(const FactorModel& model, const std::filesystem::path& path);
FactorModel load_checkpoint(const std::filesystem::path& path);

}  // namespace cfprox
