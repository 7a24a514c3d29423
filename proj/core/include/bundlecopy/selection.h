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
#include <map>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "bundlecopy/catalog.h"
#include "bundlecopy/product_words.h"

namespace bundlecopy {

struct AttributePattern {
  PatternKey key;
  std::size_t support = 0;

  bool operator==(const AttributePattern&) const = default;
};

/// topic -> patterns, each list ordered by support (descending) then key.
class PatternTable {
 public:
  PatternTable() = default;
  explicit PatternTable(std::map<std::string, std::vector<AttributePattern>> by_topic);

  // Empty span for unknown topics.
  std::span<const AttributePattern> patterns(std::string_view topic) const;
  std::vector<std::string> topics() const;
  std::size_t total_support(std::string_view topic) const;
  std::size_t size() const;
  bool empty() const { return by_topic_.empty(); }

  std::string serialize() const;
  static PatternTable deserialize(std::string_view text);
  void save(const std::filesystem::path& path) const;
  static PatternTable load(const std::filesystem::path& path);

  bool operator==(const PatternTable&) const = default;

 private:
  std::map<std::string, std::vector<AttributePattern>, std::less<>> by_topic_;
};

/// Product id -> (cid, top-1 product word) signature used for pattern keys.
class SlotIndex {
 public:
  SlotIndex(const Catalog& catalog, const ProductWordModel& model);
  // Uses each product's stored product_words instead of a model.
  static SlotIndex from_annotations(const Catalog& catalog);

  const SlotKey& slot(std::string_view product_id) const;
  PatternKey signature(const Combination& combo) const;

 private:
  SlotIndex() = default;
  std::map<std::string, SlotKey, std::less<>> slots_;
};

PatternTable extract_patterns(std::span<const Combination> dataset, const Catalog& catalog,
                              const SlotIndex& slots, std::size_t min_support = 2);
PatternTable extract_patterns(std::span<const Combination> dataset, const Catalog& catalog,
                              const ProductWordModel& model, std::size_t min_support = 2);

std::vector<Combination> select_random(const Catalog& catalog, std::string_view topic, std::size_t size,
                                       std::size_t n, std::uint64_t seed);
std::vector<Combination> select_cid(const Catalog& catalog, std::string_view topic, std::size_t size,
                                    std::size_t n, std::uint64_t seed);
std::vector<Combination> select_pattern(const Catalog& catalog, const SlotIndex& slots,
                                        const PatternTable& table, std::string_view topic, std::size_t n,
                                        std::uint64_t seed);

}  // namespace bundlecopy
