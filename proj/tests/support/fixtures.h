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

#include <string>
#include <vector>

#include "bundlecopy/catalog.h"
#include "bundlecopy/enhancement.h"
#include "bundlecopy/pipeline.h"
#include "bundlecopy/lm/sample.h"
#include "bundlecopy/lm/vocab.h"
#include "bundlecopy/product_words.h"
#include "bundlecopy/synthetic.h"

namespace fixtures {

// Topic-assigned synthetic catalog with a word model trained on its gold
// words; `catalog` carries the model's predictions.
struct Desk {
  bundlecopy::SyntheticCorpus corpus;
  bundlecopy::Catalog catalog;
  bundlecopy::ProductWordModel words;
};
Desk make_desk(std::uint64_t seed = 2024);
// Shared instance for the default seed.
const Desk& desk();

// Sofa + coffee table and water filter + air fryer, with the original and
// generated copy from the published comparison.
struct Showcase {
  bundlecopy::Catalog catalog;
  bundlecopy::ProductWordModel words;
  bundlecopy::ForbiddenLexicon lexicon;
  bundlecopy::Combination sofa_table;
  bundlecopy::Combination filter_fryer;
  std::string sofa_original;
  std::string sofa_generated;
  std::string filter_original;
  std::string filter_generated;
};
const Showcase& showcase();

// Fine-tuning data: cleaned synthetic records encoded against a vocabulary
// covering prefixes, pretraining text and copy. Every fifth sample is held out.
struct LmData {
  bundlecopy::lm::Vocab vocab;
  std::vector<bundlecopy::lm::PrefixSample> train;
  std::vector<bundlecopy::lm::PrefixSample> heldout;
};
const LmData& lm_data();

// 100 records over the synthetic catalog; record i passes every check iff
// i % 5 == 0. The others fail exactly one check, cycling through forbidden
// pattern, coverage and creativity.
std::vector<bundlecopy::CopywritingRecord> constructed_records();

// Synthetic records with random alterable, forbidden and coverage damage.
std::vector<bundlecopy::CopywritingRecord> random_records(std::uint64_t seed, std::size_t n);

// Artifacts for the serving stack written once to a temporary directory:
// catalog, patterns, lexicon, word model, strict arbitrator and a small
// fine-tuned checkpoint. Returns the config file path.
std::filesystem::path pipeline_config_path();

}  // namespace fixtures
