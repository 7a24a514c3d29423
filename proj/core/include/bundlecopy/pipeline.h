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
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "bundlecopy/arbitrator.h"
#include "bundlecopy/catalog.h"
#include "bundlecopy/enhancement.h"
#include "bundlecopy/lm/decode.h"
#include "bundlecopy/lm/model.h"
#include "bundlecopy/lm/sample.h"
#include "bundlecopy/lm/vocab.h"
#include "bundlecopy/product_words.h"
#include "bundlecopy/selection.h"

namespace bundlecopy {

struct PipelineConfig {
  std::filesystem::path catalog;
  std::filesystem::path topic_rules;  // optional; re-assigns topics when set
  std::filesystem::path patterns;
  std::filesystem::path lexicon;
  std::filesystem::path word_model;
  std::filesystem::path strict_arbitrator;
  std::filesystem::path checkpoint;

  std::optional<double> strict_threshold;  // defaults to the model's own
  EnhancementConfig enhancement;
  lm::DecodeConfig decode;
  std::size_t words_per_product = 2;
  std::uint64_t seed = 1;
  std::size_t retries = 2;

  // Relative paths resolve against `base_dir`.
  static PipelineConfig parse(std::string_view json_text, const std::filesystem::path& base_dir = {});
  static PipelineConfig load(const std::filesystem::path& path);
  std::string serialize() const;
};

/// Everything the pipeline reads. Immutable after load().
struct Artifacts {
  Catalog catalog;  // product_words re-predicted by `words`
  std::optional<SlotIndex> slots;
  PatternTable patterns;
  ForbiddenLexicon lexicon;
  ProductWordModel words;
  ArbitratorModel strict;
  lm::Model model;
  lm::Vocab vocab;
  std::map<std::string, std::string> checksums;  // artifact name -> fnv1a64 hex

  static Artifacts load(const PipelineConfig& config);
};

struct StageTimings {
  double select_ms = 0, filter_ms = 0, generate_ms = 0, enhance_ms = 0;
};

struct PipelineResult {
  Combination combination;
  double score = 0.0;
  std::string copy;  // after alterable substitutions
  Verdict verdict;
  std::size_t attempts = 0;
  StageTimings timings;
};

struct CopyResult {
  std::string copy;
  Verdict verdict;
  double score = 0.0;
  std::size_t attempts = 0;
};

// Generates copy for one combination, regenerating with a rotated product
// order up to `retries` times while the verdict is negative.
CopyResult generate_copy(const Artifacts& artifacts, const PipelineConfig& config, const Combination& combo,
                         std::optional<std::size_t> retries = std::nullopt);

// Builds a combination from explicit ids (topic from the first product).
Combination combination_from_ids(const Catalog& catalog, std::span<const std::string> ids);

// select_pattern -> strict filter -> beam generation -> enhancement checks.
std::vector<PipelineResult> run_pipeline(const Artifacts& artifacts, const PipelineConfig& config,
                                         std::string_view topic, std::size_t n);

std::string serialize_result(const PipelineResult& result);

}  // namespace bundlecopy
