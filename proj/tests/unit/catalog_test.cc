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

#include <gtest/gtest.h>

#include "bundlecopy/common.h"

#include <sstream>

#include "fixtures.h"

namespace bc = bundlecopy;

namespace {

std::vector<bc::Product> parse(const std::string& s) {
  std::istringstream in(s);
  return bc::parse_catalog(in, "test");
}

}  // namespace

TEST(CatalogParse, TwoProductsFromShowcaseCombination) {
  const auto products = parse(
      R"({"id":"a","title":"真皮沙发","cid":"1001","attributes":{"材质":"真皮"}})"
      "\n\n"
      R"({"id":"b","title":"玻璃茶几","cid":"1002"})"
      "\n");
  ASSERT_EQ(products.size(), 2u);
  EXPECT_EQ(products[0].title, "真皮沙发");
  EXPECT_EQ(products[0].attributes.at("材质"), "真皮");
  EXPECT_FALSE(products[1].topic.has_value());
}

TEST(CatalogParse, ErrorsNameTheLine) {
  try {
    parse(R"({"id":"a","title":"x","cid":"1"})" "\n" R"({"id":"b","cid":"1"})");
    FAIL() << "expected ParseError";
  } catch (const bc::ParseError& e) {
    EXPECT_EQ(e.line(), 2u);
    EXPECT_NE(std::string(e.what()).find("title"), std::string::npos);
  }
  EXPECT_THROW(parse("{not json"), bc::ParseError);
  EXPECT_THROW(parse(R"({"id":"a","title":"x","cid":"1"})" "\n" R"({"id":"a","title":"y","cid":"1"})"),
               bc::ParseError);
  EXPECT_THROW(parse(R"({"id":"a","title":"   ","cid":"1"})"), bc::ParseError);
  EXPECT_THROW(parse(R"({"id":"a","title":"x","cid":"1","attributes":{"k":3}})"), bc::ParseError);
}

TEST(CatalogParse, ProductWordsValidated) {
  EXPECT_NO_THROW(parse(R"({"id":"a","title":"x","cid":"1","product_words":["沙发"]})"));
  EXPECT_THROW(
      parse(R"({"id":"a","title":"x","cid":"1","product_words":[{"word":"a","confidence":1.5}]})"),
      bc::ParseError);
  EXPECT_THROW(parse(R"({"id":"a","title":"x","cid":"1","product_words":[{"word":"a","confidence":0.1},)"
                     R"({"word":"b","confidence":0.9}]})"),
               bc::ParseError);
}

TEST(CatalogSerialize, RoundTripsSyntheticCatalog) {
  const auto& products = fixtures::desk().catalog.products();
  std::istringstream in(bc::serialize_catalog(products));
  const auto back = bc::parse_catalog(in);
  EXPECT_EQ(std::vector<bc::Product>(products.begin(), products.end()), back);
}

TEST(Catalog, LookupAndTopics) {
  const auto& cat = fixtures::desk().catalog;
  EXPECT_EQ(cat.at("p0001").id, "p0001");
  EXPECT_EQ(cat.find("nope"), nullptr);
  EXPECT_THROW(cat.at("nope"), bc::Error);
  const auto topics = cat.topics();
  EXPECT_EQ(topics.size(), 6u);
  std::size_t total = 0;
  for (const auto& t : topics) total += cat.in_topic(t).size();
  EXPECT_EQ(total, cat.size());
}

TEST(TopicRules, CidAndTermMatchingWithFallback) {
  const auto rules = bc::parse_topic_rules(
      R"({"rules":[{"topic":"kitchen","match_cids":["2001"]},{"topic":"living_room","match_terms":["沙发"]}]})");
  ASSERT_EQ(rules.size(), 2u);
  std::vector<bc::Product> ps(3);
  ps[0] = {"a", "不粘锅", {}, "2001", {}, {}};
  ps[1] = {"b", "布艺沙发", {}, "9", {}, {}};
  ps[2] = {"c", "雨伞", {}, "9", {}, {}};
  const auto out = bc::assign_topics(ps, rules);
  EXPECT_EQ(out[0].topic, "kitchen");
  EXPECT_EQ(out[1].topic, "living_room");
  EXPECT_EQ(out[2].topic, std::string(bc::kUnassignedTopic));
  EXPECT_THROW(bc::assign_topics(ps, {}), bc::Error);
  EXPECT_THROW(bc::parse_topic_rules(R"({"rules":[{"topic":"x"}]})"), bc::Error);
  EXPECT_THROW(bc::parse_topic_rules("[1"), bc::Error);
}

TEST(TopicRules, SerializeRoundTrip) {
  const auto& rules = fixtures::desk().corpus.rules;
  const auto back = bc::parse_topic_rules(bc::serialize_topic_rules(rules));
  ASSERT_EQ(back.size(), rules.size());
  for (std::size_t i = 0; i < rules.size(); ++i) {
    EXPECT_EQ(back[i].topic, rules[i].topic);
    EXPECT_EQ(back[i].match_cids, rules[i].match_cids);
  }
}

TEST(Combinations, ValidationAndRoundTrip) {
  bc::Combination c;
  c.products = {"a"};
  EXPECT_THROW(bc::validate(c), bc::Error);
  c.products = {"a", "a"};
  EXPECT_THROW(bc::validate(c), bc::Error);
  c.products = {"a", "b"};
  c.provenance = bc::Provenance::pattern;
  EXPECT_THROW(bc::validate(c), bc::Error);
  c.pattern = bc::make_pattern_key({{"2", "y"}, {"1", "x"}});
  EXPECT_NO_THROW(bc::validate(c));
  EXPECT_EQ(c.pattern->front().cid, "1");

  std::istringstream in(bc::serialize_combination(c) + "\n");
  const auto back = bc::parse_combinations(in);
  ASSERT_EQ(back.size(), 1u);
  EXPECT_EQ(back[0], c);
  EXPECT_THROW(bc::parse_provenance("bogus"), bc::Error);
  for (auto p : {bc::Provenance::dataset, bc::Provenance::random, bc::Provenance::cid_based, bc::Provenance::pattern}) {
    EXPECT_EQ(bc::parse_provenance(bc::to_string(p)), p);
  }
}

TEST(Records, RoundTripAndRejectEmptyContent) {
  const auto& records = fixtures::desk().corpus.records;
  std::string text;
  for (const auto& r : records) text += bc::serialize_record(r) + "\n";
  std::istringstream in(text);
  EXPECT_EQ(bc::parse_records(in), records);
  std::istringstream bad(R"({"products":["a","b"],"content":"  "})");
  EXPECT_THROW(bc::parse_records(bad), bc::ParseError);
}

TEST(PatternKey, OrderInsensitive) {
  const auto a = bc::make_pattern_key({{"1002", "茶几"}, {"1001", "沙发"}});
  const auto b = bc::make_pattern_key({{"1001", "沙发"}, {"1002", "茶几"}});
  EXPECT_EQ(a, b);
  EXPECT_EQ(bc::to_string(a), bc::to_string(b));
}

TEST(TopicRules, FirstMatchWinsAndIdempotent) {
  const std::vector<bc::TopicRule> rules = {{"first", {"沙发"}, {}}, {"second", {}, {"1001"}}};
  std::vector<bc::Product> ps(1);
  ps[0] = {"a", "布艺沙发", {}, "1001", {}, {}};
  const auto once = bc::assign_topics(ps, rules);
  EXPECT_EQ(once[0].topic, "first");
  EXPECT_EQ(bc::assign_topics(once, rules), once);
  const auto& d = fixtures::desk();
  const auto again = bc::assign_topics(std::vector<bc::Product>(d.catalog.products().begin(), d.catalog.products().end()),
                                       d.corpus.rules);
  EXPECT_EQ(bc::Catalog(again), d.catalog);
}
