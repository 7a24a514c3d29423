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
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "bundlecopy/catalog.h"
#include "bundlecopy/lm/vocab.h"

namespace bundlecopy::lm {

/// prefix: serialized combination; target: copy tokens ending in EOS.
struct PrefixSample {
  std::vector<int> prefix;
  std::vector<int> target;

  std::size_t size() const { return prefix.size() + target.size(); }
  std::vector<int> joined() const;
  bool operator==(const PrefixSample&) const = default;
};

struct EncodeOptions {
  std::size_t words_per_product = 2;
  std::size_t max_len = 256;
};

// BOS topic SEP title_1 SEP words_1 SEP ... title_k SEP words_k SEP, where
// words_i are the product's leading product words joined by spaces.
// Unknown characters become UNK.
std::vector<int> encode_prefix(const Combination& combo, const Catalog& catalog, const Vocab& vocab,
                               const EncodeOptions& options = {});

// Throws when the copy has characters outside the vocabulary or the sample
// exceeds options.max_len.
PrefixSample encode_sample(const Combination& combo, const Catalog& catalog, std::string_view copy,
                           const Vocab& vocab, const EncodeOptions& options = {});

// Text for vocabulary building: everything encode_prefix can emit.
std::vector<std::string> prefix_texts(const Catalog& catalog);

struct CorruptedPrefix {
  std::vector<int> tokens;
  // (position, original id) for every masked slot.
  std::vector<std::pair<std::size_t, int>> targets;
};

// Masks ceil(ratio * eligible) non-special positions with MASK.
CorruptedPrefix corrupt_input(std::span<const int> prefix, double ratio, std::uint64_t seed);

// Undo corrupt_input using its recorded targets.
std::vector<int> restore(const CorruptedPrefix& corrupted);

}  // namespace bundlecopy::lm
