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

#include <compare>
#include <filesystem>
#include <iosfwd>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace bundlecopy {

using Attributes = std::map<std::string, std::string>;

struct ScoredWord {
  std::string word;
  double confidence = 0.0;

  bool operator==(const ScoredWord&) const = default;
};

struct Product {
  std::string id;
  std::string title;
  Attributes attributes;
  std::string cid;
  std::optional<std::string> topic;
  // Ranked by confidence, highest first.
  std::vector<ScoredWord> product_words;

  bool operator==(const Product&) const = default;
};

// Throws Error when the product violates its invariants.
void validate(const Product& product);

inline constexpr std::string_view kUnassignedTopic = "unassigned";

/// Ordered rule; the first rule that matches a product decides its topic.
struct TopicRule {
  std::string topic;
  std::vector<std::string> match_terms;
  std::vector<std::string> match_cids;
};

/// One slot of an attribute pattern.
struct SlotKey {
  std::string cid;
  std::string word;

  auto operator<=>(const SlotKey&) const = default;
};

// Multiset of slots, kept sorted so that slot order never matters.
using PatternKey = std::vector<SlotKey>;

PatternKey make_pattern_key(std::vector<SlotKey> slots);
std::string to_string(const PatternKey& key);

enum class Provenance { dataset, random, cid_based, pattern };

std::string_view to_string(Provenance p);
Provenance parse_provenance(std::string_view s);

struct Combination {
  std::vector<std::string> products;
  std::string topic;
  Provenance provenance = Provenance::dataset;
  std::optional<PatternKey> pattern;

  bool operator==(const Combination&) const = default;
};

void validate(const Combination& combo);

struct CopywritingRecord {
  Combination combination;
  std::string content;
  std::string title;

  bool operator==(const CopywritingRecord&) const = default;
};

/// Immutable, id-indexed product collection.
class Catalog {
 public:
  Catalog() = default;
  // Validates every product; duplicate ids are rejected.
  explicit Catalog(std::vector<Product> products);

  const Product& at(std::string_view id) const;
  const Product* find(std::string_view id) const;
  std::span<const Product> products() const { return products_; }
  std::size_t size() const { return products_.size(); }
  bool empty() const { return products_.empty(); }

  // Products whose topic equals `topic`, in catalog order.
  std::vector<const Product*> in_topic(std::string_view topic) const;
  // Sorted distinct assigned topics.
  std::vector<std::string> topics() const;

  bool operator==(const Catalog& other) const { return products_ == other.products_; }

 private:
  std::vector<Product> products_;
  std::map<std::string, std::size_t, std::less<>> index_;
};

// Catalog file: one JSON object per line with fields
// {id, title, attributes, cid, topic?, product_words?}.
std::vector<Product> parse_catalog(std::istream& in, const std::string& source = "<stream>");
std::vector<Product> load_catalog(const std::filesystem::path& path);
std::string serialize_product(const Product& product);
std::string serialize_catalog(std::span<const Product> products);
void save_catalog(const std::filesystem::path& path, std::span<const Product> products);

std::vector<TopicRule> parse_topic_rules(std::string_view json_text);
std::vector<TopicRule> load_topic_rules(const std::filesystem::path& path);
std::string serialize_topic_rules(std::span<const TopicRule> rules);

std::vector<Product> assign_topics(std::vector<Product> products, std::span<const TopicRule> rules);

// Combination / copywriting record files are JSON lines as well.
std::vector<Combination> parse_combinations(std::istream& in, const std::string& source = "<stream>");
std::vector<Combination> load_combinations(const std::filesystem::path& path);
std::string serialize_combination(const Combination& combo);
void save_combinations(const std::filesystem::path& path, std::span<const Combination> combos);

std::vector<CopywritingRecord> parse_records(std::istream& in, const std::string& source = "<stream>");
std::vector<CopywritingRecord> load_records(const std::filesystem::path& path);
std::string serialize_record(const CopywritingRecord& record);
void save_records(const std::filesystem::path& path, std::span<const CopywritingRecord> records);

}  // namespace bundlecopy
