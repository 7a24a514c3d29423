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

#include "bundlecopy/selection.h"

#include <algorithm>
#include <numeric>

#include "bundlecopy/common.h"
#include "json.hpp"

namespace bundlecopy {

using nlohmann::json;

namespace {

constexpr int kFormatVersion = 1;

void sort_patterns(std::vector<AttributePattern>& v) {
  std::sort(v.begin(), v.end(), [](const AttributePattern& a, const AttributePattern& b) {
    if (a.support != b.support) return a.support > b.support;
    return a.key < b.key;
  });
}

std::vector<std::string> ids_of(const std::vector<const Product*>& picked) {
  std::vector<std::string> ids;
  ids.reserve(picked.size());
  for (const Product* p : picked) ids.push_back(p->id);
  return ids;
}

// First k entries of a fresh partial Fisher-Yates shuffle of [0, n).
std::vector<std::size_t> sample_distinct(Rng& rng, std::size_t n, std::size_t k) {
  std::vector<std::size_t> idx(n);
  std::iota(idx.begin(), idx.end(), 0);
  for (std::size_t i = 0; i < k; ++i) std::swap(idx[i], idx[i + rng.index(n - i)]);
  idx.resize(k);
  return idx;
}

}  // namespace

PatternTable::PatternTable(std::map<std::string, std::vector<AttributePattern>> by_topic) {
  for (auto& [topic, list] : by_topic) {
    for (const auto& p : list) {
      if (p.key.size() < 2) throw Error("attribute pattern needs at least 2 slots");
      if (p.support < 1) throw Error("attribute pattern support must be positive");
      if (!std::is_sorted(p.key.begin(), p.key.end())) throw Error("attribute pattern key must be sorted");
    }
    if (list.empty()) continue;
    sort_patterns(list);
    by_topic_.emplace(topic, std::move(list));
  }
}

std::span<const AttributePattern> PatternTable::patterns(std::string_view topic) const {
  auto it = by_topic_.find(topic);
  if (it == by_topic_.end()) return {};
  return it->second;
}

std::vector<std::string> PatternTable::topics() const {
  std::vector<std::string> out;
  for (const auto& [t, _] : by_topic_) out.push_back(t);
  return out;
}

std::size_t PatternTable::total_support(std::string_view topic) const {
  std::size_t total = 0;
  for (const auto& p : patterns(topic)) total += p.support;
  return total;
}

std::size_t PatternTable::size() const {
  std::size_t n = 0;
  for (const auto& [_, list] : by_topic_) n += list.size();
  return n;
}

std::string PatternTable::serialize() const {
  json topics = json::object();
  for (const auto& [topic, list] : by_topic_) {
    json arr = json::array();
    for (const auto& p : list) {
      json key = json::array();
      for (const auto& s : p.key) key.push_back({s.cid, s.word});
      arr.push_back({{"key", key}, {"support", p.support}});
    }
    topics[topic] = std::move(arr);
  }
  json j{{"format", "bundlecopy.patterns"}, {"version", kFormatVersion}, {"topics", topics}};
  return j.dump(2) + "\n";
}

PatternTable PatternTable::deserialize(std::string_view text) {
  try {
    const json j = json::parse(text);
    if (j.value("format", std::string{}) != "bundlecopy.patterns") throw Error("not a pattern table file");
    if (j.at("version").get<int>() != kFormatVersion) throw Error("unsupported pattern table version");
    std::map<std::string, std::vector<AttributePattern>> by_topic;
    for (const auto& [topic, arr] : j.at("topics").items()) {
      auto& list = by_topic[topic];
      for (const auto& p : arr) {
        std::vector<SlotKey> slots;
        for (const auto& s : p.at("key")) slots.push_back({s.at(0).get<std::string>(), s.at(1).get<std::string>()});
        list.push_back({make_pattern_key(std::move(slots)), p.at("support").get<std::size_t>()});
      }
    }
    return PatternTable(std::move(by_topic));
  } catch (const json::exception& e) {
    throw Error(std::string("pattern table: ") + e.what());
  }
}

void PatternTable::save(const std::filesystem::path& path) const { write_file(path, serialize()); }

PatternTable PatternTable::load(const std::filesystem::path& path) { return deserialize(read_file(path)); }

SlotIndex::SlotIndex(const Catalog& catalog, const ProductWordModel& model) {
  for (const auto& p : catalog.products()) slots_.emplace(p.id, SlotKey{p.cid, model.top_word(p)});
}

SlotIndex SlotIndex::from_annotations(const Catalog& catalog) {
  SlotIndex index;
  for (const auto& p : catalog.products()) {
    index.slots_.emplace(p.id, SlotKey{p.cid, p.product_words.empty() ? std::string{} : p.product_words.front().word});
  }
  return index;
}

const SlotKey& SlotIndex::slot(std::string_view product_id) const {
  auto it = slots_.find(product_id);
  if (it == slots_.end()) throw Error("unknown product id '" + std::string(product_id) + "'");
  return it->second;
}

PatternKey SlotIndex::signature(const Combination& combo) const {
  std::vector<SlotKey> key;
  for (const auto& id : combo.products) key.push_back(slot(id));
  return make_pattern_key(std::move(key));
}

PatternTable extract_patterns(std::span<const Combination> dataset, const Catalog& catalog,
                              const SlotIndex& slots, std::size_t min_support) {
  std::map<std::string, std::map<PatternKey, std::size_t>> counts;
  for (std::size_t i = 0; i < dataset.size(); ++i) {
    const auto& combo = dataset[i];
    std::vector<SlotKey> key;
    for (const auto& id : combo.products) {
      if (!catalog.find(id)) {
        throw Error("combination #" + std::to_string(i) + " references unknown product '" + id + "'");
      }
      key.push_back(slots.slot(id));
    }
    std::string topic = combo.topic;
    if (topic.empty()) {
      const auto& first = catalog.at(combo.products.front());
      if (!first.topic) throw Error("combination #" + std::to_string(i) + " has no topic");
      topic = *first.topic;
    }
    ++counts[topic][make_pattern_key(std::move(key))];
  }
  std::map<std::string, std::vector<AttributePattern>> by_topic;
  for (auto& [topic, keys] : counts) {
    for (auto& [key, support] : keys) {
      if (support >= min_support) by_topic[topic].push_back({key, support});
    }
  }
  return PatternTable(std::move(by_topic));
}

PatternTable extract_patterns(std::span<const Combination> dataset, const Catalog& catalog,
                              const ProductWordModel& model, std::size_t min_support) {
  return extract_patterns(dataset, catalog, SlotIndex(catalog, model), min_support);
}

std::vector<Combination> select_random(const Catalog& catalog, std::string_view topic, std::size_t size,
                                       std::size_t n, std::uint64_t seed) {
  if (size < 2) throw Error("select_random: combination size must be at least 2");
  const auto pool = catalog.in_topic(topic);
  if (pool.size() < size) {
    throw Error("select_random: topic '" + std::string(topic) + "' has " + std::to_string(pool.size()) +
                " products, need " + std::to_string(size));
  }
  Rng rng(seed);
  std::vector<Combination> out;
  out.reserve(n);
  for (std::size_t i = 0; i < n; ++i) {
    std::vector<const Product*> picked;
    for (std::size_t k : sample_distinct(rng, pool.size(), size)) picked.push_back(pool[k]);
    out.push_back({ids_of(picked), std::string(topic), Provenance::random, std::nullopt});
  }
  return out;
}

std::vector<Combination> select_cid(const Catalog& catalog, std::string_view topic, std::size_t size,
                                    std::size_t n, std::uint64_t seed) {
  if (size < 2) throw Error("select_cid: combination size must be at least 2");
  std::map<std::string, std::vector<const Product*>> by_cid;
  for (const Product* p : catalog.in_topic(topic)) by_cid[p->cid].push_back(p);
  if (by_cid.size() < size) {
    throw Error("select_cid: topic '" + std::string(topic) + "' has " + std::to_string(by_cid.size()) +
                " distinct cids, need " + std::to_string(size));
  }
  std::vector<const std::vector<const Product*>*> groups;
  for (const auto& [_, g] : by_cid) groups.push_back(&g);
  Rng rng(seed);
  std::vector<Combination> out;
  out.reserve(n);
  for (std::size_t i = 0; i < n; ++i) {
    std::vector<const Product*> picked;
    for (std::size_t g : sample_distinct(rng, groups.size(), size)) {
      const auto& members = *groups[g];
      picked.push_back(members[rng.index(members.size())]);
    }
    out.push_back({ids_of(picked), std::string(topic), Provenance::cid_based, std::nullopt});
  }
  return out;
}

std::vector<Combination> select_pattern(const Catalog& catalog, const SlotIndex& slots,
                                        const PatternTable& table, std::string_view topic, std::size_t n,
                                        std::uint64_t seed) {
  std::map<SlotKey, std::vector<const Product*>> members;
  for (const Product* p : catalog.in_topic(topic)) members[slots.slot(p->id)].push_back(p);

  std::vector<const AttributePattern*> usable;
  std::vector<double> weights;
  for (const auto& pattern : table.patterns(topic)) {
    bool ok = true;
    for (std::size_t i = 0; i < pattern.key.size() && ok; ++i) {
      const auto mult = static_cast<std::size_t>(std::count(pattern.key.begin(), pattern.key.end(), pattern.key[i]));
      auto it = members.find(pattern.key[i]);
      ok = it != members.end() && it->second.size() >= mult;
    }
    if (ok) {
      usable.push_back(&pattern);
      weights.push_back(static_cast<double>(pattern.support));
    }
  }
  if (usable.empty()) {
    throw Error("select_pattern: no satisfiable pattern for topic '" + std::string(topic) + "'");
  }

  Rng rng(seed);
  std::vector<Combination> out;
  out.reserve(n);
  for (std::size_t i = 0; i < n; ++i) {
    const AttributePattern& pattern = *usable[rng.weighted(weights)];
    std::vector<const Product*> picked;
    for (const auto& slot : pattern.key) {
      std::vector<const Product*> free;
      for (const Product* p : members.at(slot)) {
        if (std::find(picked.begin(), picked.end(), p) == picked.end()) free.push_back(p);
      }
      picked.push_back(free[rng.index(free.size())]);
    }
    out.push_back({ids_of(picked), std::string(topic), Provenance::pattern, pattern.key});
  }
  return out;
}

}  // namespace bundlecopy
