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

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

namespace cfprox::csv {

// Splits one RFC 4180 record. Quoted fields may contain commas and doubled
// quotes. Returns false on an unterminated quote and sets `bad_column`
// (1-based).
bool split_record(std::string_view line, std::vector<std::string>& fields,
                  std::size_t& bad_column);

// Quotes a field when it contains a comma, quote or newline.
std::string escape(std::string_view field);

bool parse_int(std::string_view text, std::int64_t& out);
bool parse_double(std::string_view text, double& out);

}  // namespace cfprox::csv
