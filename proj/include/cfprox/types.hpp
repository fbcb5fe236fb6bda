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
#include <functional>
#include <ostream>
#include <stdexcept>
#include <string>

namespace cfprox {

// Strong ids. MovieLens ids fit comfortably in 64 bits.
enum class UserId : std::int64_t {};
enum class ItemId : std::int64_t {};

constexpr std::int64_t raw(UserId u) { return static_cast<std::int64_t>(u); }
constexpr std::int64_t raw(ItemId i) { return static_cast<std::int64_t>(i); }

inline std::ostream& operator<<(std::ostream& os, UserId u) { return os << raw(u); }
inline std::ostream& operator<<(std::ostream& os, ItemId i) { return os << raw(i); }

// Error taxonomy. The CLI maps each family onto an exit code.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Bad usage or configuration (exit code 1).
class ConfigError : public Error {
 public:
  using Error::Error;
};

// Malformed or inconsistent input data (exit code 2).
class DataError : public Error {
 public:
  using Error::Error;
};

class ParseError : public DataError {
 public:
  ParseError(const std::string& file, std::size_t line, std::size_t column,
             const std::string& what)
      : DataError(file + ":" + std::to_string(line) + ":" +
                  std::to_string(column) + ": " + what),
        file_(file),
        line_(line),
        column_(column) {}

  const std::string& file() const { return file_; }
  std::size_t line() const { return line_; }
  std::size_t column() const { return column_; }

 private:
  std::string file_;
  std::size_t line_;
  std::size_t column_;
};

class ValidationError : public DataError {
 public:
  using DataError::DataError;
};

// Non-finite values, singular systems (exit code 3).
class NumericalError : public Error {
 public:
  using Error::Error;
};

}  // namespace cfprox
