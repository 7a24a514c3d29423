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
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "bundlecopy/catalog.h"

namespace bundlecopy {

struct ProductWordConfig {
  int min_ngram = 1;
  int max_ngram = 3;
  std::size_t buckets = 1u << 12;
  int epochs = 10;
  double learning_rate = 0.5;
  double l2 = 1e-6;
  // Output shaping for predict(); the production thresholds are unknown, so
  // both are plain knobs.
  std::size_t top_k = 3;
  double min_confidence = 0.0;
  std::uint64_t seed = 7;
};

struct LabeledProduct {
  Product product;
  std::vector<std::string> gold;
};

// Gold labels taken from the product_words field of each product.
std::vector<LabeledProduct> labeled_from_catalog(std::span<const Product> products);

/// One-vs-rest logistic scorer over hashed character n-grams of the title
/// and attribute values. Immutable once trained; predict() is reentrant.
class ProductWordModel {
 public:
  static ProductWordModel train(std::span<const LabeledProduct> labeled,
                                const ProductWordConfig& config = {});

  std::vector<ScoredWord> predict(std::string_view title, const Attributes& attributes) const;
  std::vector<ScoredWord> predict(const Product& product) const;
  // Empty string when nothing clears min_confidence.
  std::string top_word(const Product& product) const;

  const std::vector<std::string>& vocabulary() const { return words_; }
  const ProductWordConfig& config() const { return config_; }

  std::string serialize() const;
  static ProductWordModel deserialize(std::string_view text);
  void save(const std::filesystem::path& path) const;
  static ProductWordModel load(const std::filesystem::path& path);

 private:
  struct Feature {
    std::size_t index;
    double value;
  };
  std::vector<Feature> featurize(std::string_view title, const Attributes& attributes) const;
  double logit(std::size_t word, const std::vector<Feature>& x) const;

  ProductWordConfig config_;
  std::vector<std::string> words_;
  std::vector<double> weights_;  // words_.size() x buckets, row-major
  std::vector<double> bias_;
};

// Replaces each product's product_words with the model's ranked prediction.
std::vector<Product> annotate_product_words(const ProductWordModel& model, std::vector<Product> products);

}  // namespace bundlecopy
