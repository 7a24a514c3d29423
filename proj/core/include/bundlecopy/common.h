// Copyright 2026 The bundlecopy Authors. All Rights Reserved.
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
#include <filesystem>
#include <random>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace bundlecopy {

inline constexpr std::string_view kVersion = "0.3.0";

/// Base error for every failure raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Raised while reading line-delimited input; carries the 1-based line.
class ParseError : public Error {
 public:
  ParseError(std::string source, std::size_t line, const std::string& what)
      : Error(source + ":" + std::to_string(line) + ": " + what),
        source_(std::move(source)),
        line_(line) {}

  const std::string& source() const noexcept { return source_; }
  std::size_t line() const noexcept { return line_; }

 private:
  std::string source_;
  std::size_t line_;
};

// Seeded generator with portable bounded draws. std distributions are
// implementation-defined, so the helpers below are implemented here.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  std::uint64_t next() { return engine_(); }

  // Uniform integer in [0, n). n must be positive.
  std::size_t index(std::size_t n);

  // Uniform real in [0, 1).
  double uniform();

  double normal();

  template <typename T>
  void shuffle(std::vector<T>& v) {
    for (std::size_t i = v.size(); i > 1; --i) {
      std::swap(v[i - 1], v[index(i)]);
    }
  }

  // Index drawn proportionally to non-negative weights.
  std::size_t weighted(const std::vector<double>& weights);

 private:
  std::mt19937_64 engine_;
  bool has_spare_ = false;
  double spare_ = 0.0;
};

// Derives an independent stream seed from a base seed and a salt.
std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t salt);

std::uint64_t fnv1a64(std::string_view bytes, std::uint64_t h = 0xcbf29ce484222325ULL);
std::string hex64(std::uint64_t v);

std::string read_file(const std::filesystem::path& path);
void write_file(const std::filesystem::path& path, std::string_view contents);
std::vector<std::string> read_lines(const std::filesystem::path& path);

}  // namespace bundlecopy
