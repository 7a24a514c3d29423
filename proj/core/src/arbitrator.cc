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

#include "bundlecopy/arbitrator.h"

#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>
#include <set>

#include "bundlecopy/common.h"
#include "bundlecopy/text.h"
#include "json.hpp"

namespace bundlecopy {

using nlohmann::json;

namespace {

constexpr int kFormatVersion = 1;

double sigmoid(double z) {
  if (z >= 0) return 1.0 / (1.0 + std::exp(-z));
  const double e = std::exp(z);
  return e / (1.0 + e);
}

std::string top_word(const Product& p) {
  return p.product_words.empty() ? std::string{} : p.product_words.front().word;
}

}  // namespace

std::string_view to_string(ArbitratorVariant v) { return v == ArbitratorVariant::strict ? "strict" : "normal"; }

ArbitratorVariant parse_variant(std::string_view s) {
  if (s == "strict") return ArbitratorVariant::strict;
  if (s == "normal") return ArbitratorVariant::normal;
  throw Error("unknown arbitrator variant '" + std::string(s) + "'");
}

std::vector<TrainingPair> build_training_pairs(std::span<const Combination> dataset, const Catalog& catalog,
                                               ArbitratorVariant variant, double ratio, std::uint64_t seed) {
  if (dataset.empty()) throw Error("build_training_pairs: empty dataset");
  if (!(ratio >= 0.0)) throw Error("build_training_pairs: ratio must be non-negative");

  std::vector<TrainingPair> pairs;
  std::vector<std::string> anchor_topics;
  for (const auto& combo : dataset) {
    for (const auto& id : combo.products) catalog.at(id);
    pairs.push_back({combo, true, PairSource::dataset});
    std::string topic = combo.topic;
    if (topic.empty()) topic = catalog.at(combo.products.front()).topic.value_or(std::string{});
    anchor_topics.push_back(std::move(topic));
  }

  std::map<std::string, std::vector<const Product*>, std::less<>> by_topic;
  std::map<std::string, std::map<std::string, std::vector<const Product*>>, std::less<>> by_topic_cid;
  for (const auto& p : catalog.products()) {
    if (!p.topic) continue;
    by_topic[*p.topic].push_back(&p);
    by_topic_cid[*p.topic][p.cid].push_back(&p);
  }
  auto same_cid_groups = [&](std::string_view topic) {
    std::vector<const std::vector<const Product*>*> groups;
    auto it = by_topic_cid.find(topic);
    if (it == by_topic_cid.end()) return groups;
    for (const auto& [_, g] : it->second) {
      if (g.size() >= 2) groups.push_back(&g);
    }
    return groups;
  };

  const auto wanted = static_cast<std::size_t>(std::llround(ratio * static_cast<double>(dataset.size())));
  Rng rng(seed);
  auto negative = [](std::string topic, const Product* a, const Product* b) {
    return TrainingPair{{{a->id, b->id}, std::move(topic), Provenance::random, std::nullopt},
                        false,
                        PairSource::sampled_negative};
  };

  std::size_t attempts = 0;
  std::size_t produced = 0;
  while (produced < wanted) {
    if (++attempts > 50 * (wanted + 10)) {
      throw Error("build_training_pairs: catalog too small to sample " + std::to_string(wanted) + " negatives");
    }
    const std::string& topic = anchor_topics[rng.index(anchor_topics.size())];
    auto pool_it = by_topic.find(topic);
    if (pool_it == by_topic.end()) continue;
    const auto& pool = pool_it->second;

    if (variant == ArbitratorVariant::normal) {
      if (pool.size() < 2) continue;
      const std::size_t i = rng.index(pool.size());
      std::size_t j = rng.index(pool.size() - 1);
      if (j >= i) ++j;
      pairs.push_back(negative(topic, pool[i], pool[j]));
      ++produced;
      continue;
    }

    const bool want_similar = rng.uniform() < 0.5;
    const auto groups = same_cid_groups(topic);
    const bool can_cross = by_topic.size() >= 2;
    if ((want_similar && !groups.empty()) || (!can_cross && !groups.empty())) {
      const auto& g = *groups[rng.index(groups.size())];
      const std::size_t i = rng.index(g.size());
      std::size_t j = rng.index(g.size() - 1);
      if (j >= i) ++j;
      pairs.push_back(negative(topic, g[i], g[j]));
      ++produced;
    } else if (can_cross) {
      std::vector<const std::vector<const Product*>*> others;
      for (const auto& [t, members] : by_topic) {
        if (t != topic) others.push_back(&members);
      }
      const auto& other = *others[rng.index(others.size())];
      pairs.push_back(negative(topic, pool[rng.index(pool.size())], other[rng.index(other.size())]));
      ++produced;
    }
  }
  return pairs;
}

std::vector<ArbitratorModel::Feature> ArbitratorModel::featurize(const Combination& combo,
                                                                 const Catalog& catalog) const {
  std::map<std::size_t, double> acc;
  auto add = [&](std::string_view name, double value) {
    acc[fnv1a64(name) % config_.buckets] += value;
  };
  std::vector<const Product*> products;
  for (const auto& id : combo.products) products.push_back(&catalog.at(id));

  for (const Product* p : products) {
    const std::string w = top_word(*p);
    if (!w.empty()) add("w:" + w, 1.0);
    add("c:" + p->cid, 1.0);
    std::map<std::string, int> grams;
    const auto chars = text::characters(text::normalize(p->title));
    for (std::size_t i = 0; i + 1 < chars.size(); ++i) {
      if (chars[i] == " " || chars[i + 1] == " ") continue;
      ++grams[chars[i] + chars[i + 1]];
    }
    if (!grams.empty()) {
      const double scale = config_.title_weight / std::sqrt(static_cast<double>(grams.size()));
      for (const auto& [g, c] : grams) add("t:" + g, scale * c);
    }
  }
  for (std::size_t i = 0; i < products.size(); ++i) {
    for (std::size_t j = i + 1; j < products.size(); ++j) {
      auto w1 = top_word(*products[i]), w2 = top_word(*products[j]);
      auto c1 = products[i]->cid, c2 = products[j]->cid;
      if (w2 < w1) std::swap(w1, w2);
      if (c2 < c1) std::swap(c1, c2);
      add("ww:" + w1 + "|" + w2, 1.0);
      add("cc:" + c1 + "|" + c2, 1.0);
      if (c1 == c2) add("same_cid", 1.0);
      if (!w1.empty() && w1 == w2) add("same_word", 1.0);
    }
  }
  std::vector<Feature> out;
  out.reserve(acc.size());
  for (const auto& [i, v] : acc) out.push_back({i, v});
  return out;
}

double ArbitratorModel::logit(const std::vector<Feature>& x) const {
  double z = bias_;
  for (const auto& f : x) z += weights_[f.index] * f.value;
  return z;
}

ArbitratorModel ArbitratorModel::train(std::span<const TrainingPair> pairs, const Catalog& catalog,
                                       ArbitratorVariant variant, const ArbitratorConfig& config) {
  if (config.buckets == 0) throw Error("train_arbitrator: buckets must be positive");
  if (!(config.threshold > 0.0 && config.threshold < 1.0)) {
    throw Error("train_arbitrator: threshold must lie in (0,1)");
  }
  const bool has_pos = std::any_of(pairs.begin(), pairs.end(), [](const auto& p) { return p.positive; });
  const bool has_neg = std::any_of(pairs.begin(), pairs.end(), [](const auto& p) { return !p.positive; });
  if (!has_pos || !has_neg) throw Error("train_arbitrator: training pairs must contain both labels");

  ArbitratorModel m;
  m.variant_ = variant;
  m.config_ = config;
  m.weights_.assign(config.buckets, 0.0);

  std::vector<std::vector<Feature>> xs;
  xs.reserve(pairs.size());
  for (const auto& p : pairs) xs.push_back(m.featurize(p.combination, catalog));

  std::vector<std::size_t> order(pairs.size());
  std::iota(order.begin(), order.end(), 0);
  Rng rng(config.seed);
  for (int epoch = 0; epoch < config.epochs; ++epoch) {
    rng.shuffle(order);
    for (std::size_t idx : order) {
      const double g = sigmoid(m.logit(xs[idx])) - (pairs[idx].positive ? 1.0 : 0.0);
      for (const auto& f : xs[idx]) {
        double& w = m.weights_[f.index];
        w -= config.learning_rate * (g * f.value + config.l2 * w);
      }
      m.bias_ -= config.learning_rate * g;
    }
  }
  return m;
}

double ArbitratorModel::score(const Combination& combo, const Catalog& catalog) const {
  return sigmoid(logit(featurize(combo, catalog)));
}

std::string ArbitratorModel::serialize() const {
  json idx = json::array(), val = json::array();
  for (std::size_t i = 0; i < weights_.size(); ++i) {
    if (weights_[i] != 0.0) {
      idx.push_back(i);
      val.push_back(weights_[i]);
    }
  }
  json j{{"format", "bundlecopy.arbitrator"},
         {"version", kFormatVersion},
         {"variant", std::string(to_string(variant_))},
         {"config",
          {{"buckets", config_.buckets},
           {"epochs", config_.epochs},
           {"learning_rate", config_.learning_rate},
           {"l2", config_.l2},
           {"title_weight", config_.title_weight},
           {"threshold", config_.threshold},
           {"seed", config_.seed}}},
         {"bias", bias_},
         {"weights", {{"index", idx}, {"value", val}}}};
  return j.dump();
}

ArbitratorModel ArbitratorModel::deserialize(std::string_view text) {
  try {
    const json j = json::parse(text);
    if (j.value("format", std::string{}) != "bundlecopy.arbitrator") throw Error("not an arbitrator model file");
    if (j.at("version").get<int>() != kFormatVersion) throw Error("unsupported arbitrator model version");
    ArbitratorModel m;
    m.variant_ = parse_variant(j.at("variant").get<std::string>());
    const auto& c = j.at("config");
    m.config_.buckets = c.at("buckets");
    m.config_.epochs = c.at("epochs");
    m.config_.learning_rate = c.at("learning_rate");
    m.config_.l2 = c.at("l2");
    m.config_.title_weight = c.at("title_weight");
    m.config_.threshold = c.at("threshold");
    m.config_.seed = c.at("seed");
    if (m.config_.buckets == 0) throw Error("arbitrator model: zero buckets");
    m.bias_ = j.at("bias");
    m.weights_.assign(m.config_.buckets, 0.0);
    const auto idx = j.at("weights").at("index").get<std::vector<std::size_t>>();
    const auto val = j.at("weights").at("value").get<std::vector<double>>();
    if (idx.size() != val.size()) throw Error("arbitrator model: ragged weights");
    for (std::size_t k = 0; k < idx.size(); ++k) {
      if (idx[k] >= m.weights_.size()) throw Error("arbitrator model: weight index out of range");
      m.weights_[idx[k]] = val[k];
    }
    return m;
  } catch (const json::exception& e) {
    throw Error(std::string("arbitrator model: ") + e.what());
  }
}

void ArbitratorModel::save(const std::filesystem::path& path) const { write_file(path, serialize()); }

ArbitratorModel ArbitratorModel::load(const std::filesystem::path& path) { return deserialize(read_file(path)); }

double score_combination(const ArbitratorModel& model, const Combination& combo, const Catalog& catalog) {
  return model.score(combo, catalog);
}

std::vector<Combination> filter_combinations(const ArbitratorModel& strict_model,
                                             std::span<const Combination> combos, const Catalog& catalog,
                                             double threshold) {
  if (strict_model.variant() != ArbitratorVariant::strict) {
    throw Error("filter_combinations: only the strict arbitrator may filter final results");
  }
  std::vector<Combination> out;
  for (const auto& c : combos) {
    if (strict_model.score(c, catalog) >= threshold) out.push_back(c);
  }
  return out;
}

double acceptance_rate(const ArbitratorModel& model, std::span<const Combination> combos,
                       const Catalog& catalog) {
  if (combos.empty()) return 0.0;
  std::size_t accepted = 0;
  for (const auto& c : combos) {
    if (model.score(c, catalog) >= model.threshold()) ++accepted;
  }
  return static_cast<double>(accepted) / static_cast<double>(combos.size());
}

double pair_accuracy(const ArbitratorModel& model, std::span<const TrainingPair> pairs, const Catalog& catalog) {
  if (pairs.empty()) return 0.0;
  std::size_t correct = 0;
  for (const auto& p : pairs) {
    const bool predicted = model.score(p.combination, catalog) >= model.threshold();
    if (predicted == p.positive) ++correct;
  }
  return static_cast<double>(correct) / static_cast<double>(pairs.size());
}

}  // namespace bundlecopy
