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

#include "bundlecopy/product_words.h"

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

}  // namespace

std::vector<LabeledProduct> labeled_from_catalog(std::span<const Product> products) {
  std::vector<LabeledProduct> out;
  for (const auto& p : products) {
    if (p.product_words.empty()) continue;
    LabeledProduct lp{p, {}};
    for (const auto& w : p.product_words) lp.gold.push_back(w.word);
    out.push_back(std::move(lp));
  }
  return out;
}

std::vector<ProductWordModel::Feature> ProductWordModel::featurize(std::string_view title,
                                                                   const Attributes& attributes) const {
  std::map<std::size_t, double> counts;
  auto add_grams = [&](std::string_view s, std::uint64_t salt) {
    auto chars = text::characters(text::normalize(s));
    chars.insert(chars.begin(), "\x02");
    chars.push_back("\x03");
    for (int n = config_.min_ngram; n <= config_.max_ngram; ++n) {
      for (std::size_t i = 0; i + static_cast<std::size_t>(n) <= chars.size(); ++i) {
        std::string gram;
        for (int k = 0; k < n; ++k) gram += chars[i + static_cast<std::size_t>(k)];
        if (gram == " ") continue;
        counts[fnv1a64(gram, mix_seed(salt, static_cast<std::uint64_t>(n))) % config_.buckets] += 1.0;
      }
    }
  };
  add_grams(title, 1);
  for (const auto& [k, v] : attributes) add_grams(v, 2);
  double norm = 0.0;
  for (const auto& [i, c] : counts) norm += c * c;
  norm = norm > 0 ? std::sqrt(norm) : 1.0;
  std::vector<Feature> out;
  out.reserve(counts.size());
  for (const auto& [i, c] : counts) out.push_back({i, c / norm});
  return out;
}

double ProductWordModel::logit(std::size_t word, const std::vector<Feature>& x) const {
  const double* w = weights_.data() + word * config_.buckets;
  double z = bias_[word];
  for (const auto& f : x) z += w[f.index] * f.value;
  return z;
}

ProductWordModel ProductWordModel::train(std::span<const LabeledProduct> labeled,
                                         const ProductWordConfig& config) {
  if (config.buckets == 0 || config.min_ngram < 1 || config.max_ngram < config.min_ngram) {
    throw Error("product word model: invalid feature config");
  }
  std::set<std::string> vocab;
  for (const auto& lp : labeled) vocab.insert(lp.gold.begin(), lp.gold.end());
  vocab.erase(std::string{});
  if (labeled.empty() || vocab.empty()) throw Error("product word model: empty label set");

  ProductWordModel m;
  m.config_ = config;
  m.words_.assign(vocab.begin(), vocab.end());
  m.weights_.assign(m.words_.size() * config.buckets, 0.0);
  m.bias_.assign(m.words_.size(), 0.0);

  std::vector<std::vector<Feature>> features;
  std::vector<std::vector<char>> targets;
  for (const auto& lp : labeled) {
    if (text::normalize(lp.product.title).empty()) throw Error("product word model: empty title");
    features.push_back(m.featurize(lp.product.title, lp.product.attributes));
    std::vector<char> y(m.words_.size(), 0);
    for (const auto& g : lp.gold) {
      auto it = std::lower_bound(m.words_.begin(), m.words_.end(), g);
      if (it != m.words_.end() && *it == g) y[static_cast<std::size_t>(it - m.words_.begin())] = 1;
    }
    targets.push_back(std::move(y));
  }

  std::vector<std::size_t> order(labeled.size());
  std::iota(order.begin(), order.end(), 0);
  Rng rng(config.seed);
  const double lr = config.learning_rate;
  for (int epoch = 0; epoch < config.epochs; ++epoch) {
    rng.shuffle(order);
    for (std::size_t idx : order) {
      const auto& x = features[idx];
      for (std::size_t w = 0; w < m.words_.size(); ++w) {
        const double g = sigmoid(m.logit(w, x)) - targets[idx][w];
        double* row = m.weights_.data() + w * config.buckets;
        for (const auto& f : x) row[f.index] -= lr * (g * f.value + config.l2 * row[f.index]);
        m.bias_[w] -= lr * g;
      }
    }
  }
  return m;
}

std::vector<ScoredWord> ProductWordModel::predict(std::string_view title, const Attributes& attributes) const {
  if (text::normalize(title).empty()) throw Error("predict_product_words: empty title");
  const auto x = featurize(title, attributes);
  std::vector<ScoredWord> out;
  out.reserve(words_.size());
  for (std::size_t w = 0; w < words_.size(); ++w) {
    const double c = sigmoid(logit(w, x));
    if (c >= config_.min_confidence) out.push_back({words_[w], c});
  }
  std::stable_sort(out.begin(), out.end(), [](const ScoredWord& a, const ScoredWord& b) {
    return a.confidence > b.confidence;
  });
  if (out.size() > config_.top_k) out.resize(config_.top_k);
  return out;
}

std::vector<ScoredWord> ProductWordModel::predict(const Product& product) const {
  return predict(product.title, product.attributes);
}

std::string ProductWordModel::top_word(const Product& product) const {
  auto words = predict(product);
  return words.empty() ? std::string{} : words.front().word;
}

std::string ProductWordModel::serialize() const {
  json j;
  j["format"] = "bundlecopy.product_words";
  j["version"] = kFormatVersion;
  j["config"] = {{"min_ngram", config_.min_ngram},   {"max_ngram", config_.max_ngram},
                 {"buckets", config_.buckets},       {"epochs", config_.epochs},
                 {"learning_rate", config_.learning_rate}, {"l2", config_.l2},
                 {"top_k", config_.top_k},           {"min_confidence", config_.min_confidence},
                 {"seed", config_.seed}};
  j["words"] = words_;
  j["bias"] = bias_;
  // Sparse rows: most hashed buckets never fire for a given word.
  json rows = json::array();
  for (std::size_t w = 0; w < words_.size(); ++w) {
    json idx = json::array(), val = json::array();
    for (std::size_t b = 0; b < config_.buckets; ++b) {
      const double v = weights_[w * config_.buckets + b];
      if (v != 0.0) {
        idx.push_back(b);
        val.push_back(v);
      }
    }
    rows.push_back({{"index", idx}, {"value", val}});
  }
  j["weights"] = std::move(rows);
  return j.dump();
}

ProductWordModel ProductWordModel::deserialize(std::string_view text) {
  try {
    const json j = json::parse(text);
    if (j.value("format", std::string{}) != "bundlecopy.product_words") {
      throw Error("not a product word model file");
    }
    if (j.at("version").get<int>() != kFormatVersion) throw Error("unsupported product word model version");
    ProductWordModel m;
    const auto& c = j.at("config");
    m.config_.min_ngram = c.at("min_ngram");
    m.config_.max_ngram = c.at("max_ngram");
    m.config_.buckets = c.at("buckets");
    m.config_.epochs = c.at("epochs");
    m.config_.learning_rate = c.at("learning_rate");
    m.config_.l2 = c.at("l2");
    m.config_.top_k = c.at("top_k");
    m.config_.min_confidence = c.at("min_confidence");
    m.config_.seed = c.at("seed");
    m.words_ = j.at("words").get<std::vector<std::string>>();
    m.bias_ = j.at("bias").get<std::vector<double>>();
    const auto& rows = j.at("weights");
    if (rows.size() != m.words_.size() || m.bias_.size() != m.words_.size() || m.config_.buckets == 0) {
      throw Error("product word model: inconsistent shapes");
    }
    m.weights_.assign(m.words_.size() * m.config_.buckets, 0.0);
    for (std::size_t w = 0; w < rows.size(); ++w) {
      const auto idx = rows[w].at("index").get<std::vector<std::size_t>>();
      const auto val = rows[w].at("value").get<std::vector<double>>();
      if (idx.size() != val.size()) throw Error("product word model: ragged weight row");
      for (std::size_t k = 0; k < idx.size(); ++k) {
        if (idx[k] >= m.config_.buckets) throw Error("product word model: bucket out of range");
        m.weights_[w * m.config_.buckets + idx[k]] = val[k];
      }
    }
    return m;
  } catch (const json::exception& e) {
    throw Error(std::string("product word model: ") + e.what());
  }
}

void ProductWordModel::save(const std::filesystem::path& path) const { write_file(path, serialize()); }

ProductWordModel ProductWordModel::load(const std::filesystem::path& path) {
  return deserialize(read_file(path));
}

std::vector<Product> annotate_product_words(const ProductWordModel& model, std::vector<Product> products) {
  for (auto& p : products) p.product_words = model.predict(p);
  return products;
}

}  // namespace bundlecopy
