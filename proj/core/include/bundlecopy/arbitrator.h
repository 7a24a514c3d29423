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

// normal: negatives are random pairs inside the positive's topic.
// strict: negatives are same-cid pairs inside a topic (similar, not
// complementary) mixed with cross-topic pairs (unrelated).
enum class ArbitratorVariant { strict, normal };

std::string_view to_string(ArbitratorVariant v);
ArbitratorVariant parse_variant(std::string_view s);

enum class PairSource { dataset, sampled_negative };

struct TrainingPair {
  Combination combination;
  bool positive = false;
  PairSource source = PairSource::dataset;
};

std::vector<TrainingPair> build_training_pairs(std::span<const Combination> dataset, const Catalog& catalog,
                                               ArbitratorVariant variant, double ratio, std::uint64_t seed);

struct ArbitratorConfig {
  std::size_t buckets = 1u << 18;
  int epochs = 20;
  double learning_rate = 0.1;
  double l2 = 1e-6;
  double title_weight = 0.5;
  double threshold = 0.5;
  std::uint64_t seed = 11;
};

/// Logistic combination classifier over hashed joint text features: titles,
/// cids, top product words and pairwise interactions between slots.
class ArbitratorModel {
 public:
  static ArbitratorModel train(std::span<const TrainingPair> pairs, const Catalog& catalog,
                               ArbitratorVariant variant, const ArbitratorConfig& config = {});

  // In [0, 1]; pure and deterministic.
  double score(const Combination& combo, const Catalog& catalog) const;

  ArbitratorVariant variant() const { return variant_; }
  double threshold() const { return config_.threshold; }
  const ArbitratorConfig& config() const { return config_; }

  std::string serialize() const;
  static ArbitratorModel deserialize(std::string_view text);
  void save(const std::filesystem::path& path) const;
  static ArbitratorModel load(const std::filesystem::path& path);

 private:
  struct Feature {
    std::size_t index;
    double value;
  };
  std::vector<Feature> featurize(const Combination& combo, const Catalog& catalog) const;
  double logit(const std::vector<Feature>& x) const;

  ArbitratorVariant variant_ = ArbitratorVariant::normal;
  ArbitratorConfig config_;
  std::vector<double> weights_;
  double bias_ = 0.0;
};

double score_combination(const ArbitratorModel& model, const Combination& combo, const Catalog& catalog);

// Keeps combinations scoring >= threshold, in input order. Only the strict
// variant may act as the final filter.
std::vector<Combination> filter_combinations(const ArbitratorModel& strict_model,
                                             std::span<const Combination> combos, const Catalog& catalog,
                                             double threshold);

// Fraction of combinations scoring >= the model's threshold.
double acceptance_rate(const ArbitratorModel& model, std::span<const Combination> combos,
                       const Catalog& catalog);

// Accuracy of a model on labelled pairs at its threshold.
double pair_accuracy(const ArbitratorModel& model, std::span<const TrainingPair> pairs, const Catalog& catalog);

}  // namespace bundlecopy
