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

#include "bundlecopy/catalog.h"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

#include "bundlecopy/common.h"
#include "bundlecopy/text.h"
#include "json.hpp"

namespace bundlecopy {

using nlohmann::json;

namespace {

bool blank(std::string_view s) {
  return std::all_of(s.begin(), s.end(), [](unsigned char c) { return std::isspace(c); });
}

std::string require_string(const json& obj, const char* field) {
  auto it = obj.find(field);
  if (it == obj.end()) throw Error(std::string("missing field '") + field + "'");
  if (!it->is_string()) throw Error(std::string("field '") + field + "' must be a string");
  return it->get<std::string>();
}

template <typename T, typename Fn>
std::vector<T> parse_lines(std::istream& in, const std::string& source, Fn&& parse_one) {
  std::vector<T> out;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (blank(line)) continue;
    try {
      out.push_back(parse_one(json::parse(line)));
    } catch (const json::exception& e) {
      throw ParseError(source, lineno, e.what());
    } catch (const ParseError&) {
      throw;
    } catch (const Error& e) {
      throw ParseError(source, lineno, e.what());
    }
  }
  return out;
}

template <typename T, typename Fn>
std::vector<T> load_lines(const std::filesystem::path& path, Fn&& parse) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open " + path.string());
  return parse(in, path.string());
}

Product product_from_json(const json& j) {
  if (!j.is_object()) throw Error("record must be a JSON object");
  Product p;
  p.id = require_string(j, "id");
  p.title = require_string(j, "title");
  p.cid = require_string(j, "cid");
  if (auto it = j.find("attributes"); it != j.end() && !it->is_null()) {
    if (!it->is_object()) throw Error("field 'attributes' must be an object");
    for (const auto& [k, v] : it->items()) {
      if (!v.is_string()) throw Error("attribute '" + k + "' must be a string");
      p.attributes.emplace(k, v.get<std::string>());
    }
  }
  if (auto it = j.find("topic"); it != j.end() && !it->is_null()) {
    if (!it->is_string()) throw Error("field 'topic' must be a string");
    p.topic = it->get<std::string>();
  }
  if (auto it = j.find("product_words"); it != j.end() && !it->is_null()) {
    if (!it->is_array()) throw Error("field 'product_words' must be an array");
    for (const auto& w : *it) {
      if (w.is_string()) {
        p.product_words.push_back({w.get<std::string>(), 1.0});
      } else if (w.is_object()) {
        p.product_words.push_back({require_string(w, "word"), w.value("confidence", 1.0)});
      } else {
        throw Error("product_words entries must be strings or {word, confidence}");
      }
    }
  }
  validate(p);
  return p;
}

json product_to_json(const Product& p) {
  json j;
  j["id"] = p.id;
  j["title"] = p.title;
  j["attributes"] = json::object();
  for (const auto& [k, v] : p.attributes) j["attributes"][k] = v;
  j["cid"] = p.cid;
  if (p.topic) j["topic"] = *p.topic;
  if (!p.product_words.empty()) {
    json words = json::array();
    for (const auto& w : p.product_words) words.push_back({{"word", w.word}, {"confidence", w.confidence}});
    j["product_words"] = std::move(words);
  }
  return j;
}

PatternKey pattern_from_json(const json& j) {
  if (!j.is_array()) throw Error("field 'pattern' must be an array of [cid, word] pairs");
  std::vector<SlotKey> slots;
  for (const auto& s : j) {
    if (!s.is_array() || s.size() != 2 || !s[0].is_string() || !s[1].is_string()) {
      throw Error("pattern slots must be [cid, word] string pairs");
    }
    slots.push_back({s[0].get<std::string>(), s[1].get<std::string>()});
  }
  return make_pattern_key(std::move(slots));
}

Combination combination_from_json(const json& j) {
  if (!j.is_object()) throw Error("record must be a JSON object");
  Combination c;
  auto it = j.find("products");
  if (it == j.end() || !it->is_array()) throw Error("field 'products' must be an array");
  for (const auto& id : *it) {
    if (!id.is_string()) throw Error("product ids must be strings");
    c.products.push_back(id.get<std::string>());
  }
  c.topic = j.value("topic", std::string{});
  c.provenance = parse_provenance(j.value("provenance", std::string{"dataset"}));
  if (auto p = j.find("pattern"); p != j.end() && !p->is_null()) c.pattern = pattern_from_json(*p);
  validate(c);
  return c;
}

json combination_to_json(const Combination& c) {
  json j;
  j["products"] = c.products;
  j["topic"] = c.topic;
  j["provenance"] = std::string(to_string(c.provenance));
  if (c.pattern) {
    json slots = json::array();
    for (const auto& s : *c.pattern) slots.push_back({s.cid, s.word});
    j["pattern"] = std::move(slots);
  }
  return j;
}

}  // namespace

void validate(const Product& p) {
  if (p.id.empty()) throw Error("product id must be non-empty");
  if (blank(p.title)) throw Error("product '" + p.id + "' has an empty title");
  for (std::size_t i = 0; i < p.product_words.size(); ++i) {
    const double c = p.product_words[i].confidence;
    if (!(c >= 0.0 && c <= 1.0)) {
      throw Error("product '" + p.id + "' has a confidence outside [0,1]");
    }
    if (i > 0 && c > p.product_words[i - 1].confidence) {
      throw Error("product '" + p.id + "' product_words are not sorted by confidence");
    }
  }
}

PatternKey make_pattern_key(std::vector<SlotKey> slots) {
  std::sort(slots.begin(), slots.end());
  return slots;
}

std::string to_string(const PatternKey& key) {
  std::string out;
  for (std::size_t i = 0; i < key.size(); ++i) {
    if (i) out += " + ";
    out += key[i].cid + "/" + key[i].word;
  }
  return out;
}

std::string_view to_string(Provenance p) {
  switch (p) {
    case Provenance::dataset: return "dataset";
    case Provenance::random: return "random";
    case Provenance::cid_based: return "cid_based";
    case Provenance::pattern: return "pattern";
  }
  return "dataset";
}

Provenance parse_provenance(std::string_view s) {
  if (s == "dataset") return Provenance::dataset;
  if (s == "random") return Provenance::random;
  if (s == "cid_based" || s == "cid") return Provenance::cid_based;
  if (s == "pattern") return Provenance::pattern;
  throw Error("unknown provenance '" + std::string(s) + "'");
}

void validate(const Combination& c) {
  if (c.products.size() < 2) throw Error("a combination needs at least 2 products");
  std::set<std::string_view> seen;
  for (const auto& id : c.products) {
    if (id.empty()) throw Error("combination contains an empty product id");
    if (!seen.insert(id).second) throw Error("combination repeats product '" + id + "'");
  }
  if (c.provenance == Provenance::pattern && !c.pattern) {
    throw Error("pattern-selected combination must record its pattern");
  }
}

Catalog::Catalog(std::vector<Product> products) : products_(std::move(products)) {
  for (std::size_t i = 0; i < products_.size(); ++i) {
    validate(products_[i]);
    if (!index_.emplace(products_[i].id, i).second) {
      throw Error("duplicate product id '" + products_[i].id + "'");
    }
  }
}

const Product* Catalog::find(std::string_view id) const {
  auto it = index_.find(id);
  return it == index_.end() ? nullptr : &products_[it->second];
}

const Product& Catalog::at(std::string_view id) const {
  if (const Product* p = find(id)) return *p;
  throw Error("unknown product id '" + std::string(id) + "'");
}

std::vector<const Product*> Catalog::in_topic(std::string_view topic) const {
  std::vector<const Product*> out;
  for (const auto& p : products_) {
    if (p.topic && *p.topic == topic) out.push_back(&p);
  }
  return out;
}

std::vector<std::string> Catalog::topics() const {
  std::set<std::string> s;
  for (const auto& p : products_) {
    if (p.topic) s.insert(*p.topic);
  }
  return {s.begin(), s.end()};
}

std::vector<Product> parse_catalog(std::istream& in, const std::string& source) {
  std::set<std::string> ids;
  std::vector<Product> out;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (blank(line)) continue;
    try {
      Product p = product_from_json(json::parse(line));
      if (!ids.insert(p.id).second) throw Error("duplicate product id '" + p.id + "'");
      out.push_back(std::move(p));
    } catch (const json::exception& e) {
      throw ParseError(source, lineno, e.what());
    } catch (const Error& e) {
      throw ParseError(source, lineno, e.what());
    }
  }
  return out;
}

std::vector<Product> load_catalog(const std::filesystem::path& path) {
  return load_lines<Product>(path, [](std::istream& in, const std::string& src) {
    return parse_catalog(in, src);
  });
}

std::string serialize_product(const Product& p) { return product_to_json(p).dump(); }

std::string serialize_catalog(std::span<const Product> products) {
  std::string out;
  for (const auto& p : products) {
    out += serialize_product(p);
    out += '\n';
  }
  return out;
}

void save_catalog(const std::filesystem::path& path, std::span<const Product> products) {
  write_file(path, serialize_catalog(products));
}

std::vector<TopicRule> parse_topic_rules(std::string_view json_text) {
  json j;
  try {
    j = json::parse(json_text);
  } catch (const json::exception& e) {
    throw Error(std::string("topic rules: ") + e.what());
  }
  const json* list = &j;
  if (j.is_object()) {
    auto it = j.find("rules");
    if (it == j.end()) throw Error("topic rules: missing 'rules' array");
    list = &*it;
  }
  if (!list->is_array()) throw Error("topic rules: 'rules' must be an array");
  std::vector<TopicRule> rules;
  for (const auto& r : *list) {
    TopicRule rule;
    rule.topic = require_string(r, "topic");
    rule.match_terms = r.value("match_terms", std::vector<std::string>{});
    rule.match_cids = r.value("match_cids", std::vector<std::string>{});
    if (rule.topic.empty()) throw Error("topic rules: empty topic name");
    if (rule.match_terms.empty() && rule.match_cids.empty()) {
      throw Error("topic rule '" + rule.topic + "' has neither match_terms nor match_cids");
    }
    rules.push_back(std::move(rule));
  }
  return rules;
}

std::vector<TopicRule> load_topic_rules(const std::filesystem::path& path) {
  return parse_topic_rules(read_file(path));
}

std::string serialize_topic_rules(std::span<const TopicRule> rules) {
  json list = json::array();
  for (const auto& r : rules) {
    list.push_back({{"topic", r.topic}, {"match_terms", r.match_terms}, {"match_cids", r.match_cids}});
  }
  return json{{"rules", list}}.dump(2) + "\n";
}

std::vector<Product> assign_topics(std::vector<Product> products, std::span<const TopicRule> rules) {
  if (rules.empty()) throw Error("assign_topics: at least one rule is required");
  std::vector<std::vector<std::vector<std::string>>> rule_terms;
  for (const auto& r : rules) {
    auto& terms = rule_terms.emplace_back();
    for (const auto& t : r.match_terms) terms.push_back(text::tokenize(t));
  }
  for (auto& p : products) {
    const auto title_tokens = text::tokenize(p.title);
    p.topic = std::string(kUnassignedTopic);
    for (std::size_t r = 0; r < rules.size(); ++r) {
      const bool cid_hit = std::find(rules[r].match_cids.begin(), rules[r].match_cids.end(),
                                     p.cid) != rules[r].match_cids.end();
      const bool term_hit = std::any_of(rule_terms[r].begin(), rule_terms[r].end(),
                                        [&](const auto& t) { return text::contains_tokens(title_tokens, t); });
      if (cid_hit || term_hit) {
        p.topic = rules[r].topic;
        break;
      }
    }
  }
  return products;
}

std::vector<Combination> parse_combinations(std::istream& in, const std::string& source) {
  return parse_lines<Combination>(in, source, combination_from_json);
}

std::vector<Combination> load_combinations(const std::filesystem::path& path) {
  return load_lines<Combination>(path, [](std::istream& in, const std::string& src) {
    return parse_combinations(in, src);
  });
}

std::string serialize_combination(const Combination& c) { return combination_to_json(c).dump(); }

void save_combinations(const std::filesystem::path& path, std::span<const Combination> combos) {
  std::string out;
  for (const auto& c : combos) out += serialize_combination(c) + "\n";
  write_file(path, out);
}

std::vector<CopywritingRecord> parse_records(std::istream& in, const std::string& source) {
  return parse_lines<CopywritingRecord>(in, source, [](const json& j) {
    CopywritingRecord r;
    r.combination = combination_from_json(j);
    r.content = require_string(j, "content");
    r.title = j.value("title", std::string{});
    if (blank(r.content)) throw Error("copywriting content must be non-empty");
    return r;
  });
}

std::vector<CopywritingRecord> load_records(const std::filesystem::path& path) {
  return load_lines<CopywritingRecord>(path, [](std::istream& in, const std::string& src) {
    return parse_records(in, src);
  });
}

std::string serialize_record(const CopywritingRecord& r) {
  json j = combination_to_json(r.combination);
  j["title"] = r.title;
  j["content"] = r.content;
  return j.dump();
}

void save_records(const std::filesystem::path& path, std::span<const CopywritingRecord> records) {
  std::string out;
  for (const auto& r : records) out += serialize_record(r) + "\n";
  write_file(path, out);
}

}  // namespace bundlecopy
