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
#include <string>
#include <vector>

#include "bundlecopy/catalog.h"
#include "bundlecopy/enhancement.h"

namespace bundlecopy {

// Seeded toy corpus: six topic channels with seven detailed categories each,
// a handful of complementary category pairs per topic that curators favour,
// and one over-stocked category per topic that rarely pairs well.
struct SyntheticConfig {
  std::uint64_t seed = 2024;
  std::size_t dominant_products = 60;  // per topic, in the over-stocked cid
  std::size_t other_products = 18;     // per remaining cid
  std::size_t combinations = 300;
  std::size_t pretrain_texts = 500;
  double curator_noise = 0.05;      // curated pairs drawn at random instead
  double flawed_fraction = 0.15;    // records with one of the three failure kinds
  double alterable_fraction = 0.10; // records carrying an alterable phrase
};

struct SyntheticCorpus {
  std::vector<Product> products;  // gold product_words, no topic
  std::vector<TopicRule> rules;
  std::vector<Combination> combinations;
  std::vector<CopywritingRecord> records;  // one per combination
  std::vector<std::string> pretrain_corpus;
  ForbiddenLexicon lexicon;
};

SyntheticCorpus generate_synthetic(const SyntheticConfig& config = {});

// The small demonstrative lexicon shipped with the corpus.
ForbiddenLexicon demo_lexicon();

// Writes catalog.jsonl, topic_rules.json, combinations.jsonl, records.jsonl,
// pretrain.txt and lexicon.jsonl into `dir`.
void write_synthetic(const std::filesystem::path& dir, const SyntheticCorpus& corpus);

}  // namespace bundlecopy
