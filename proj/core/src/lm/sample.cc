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

#include "bundlecopy/lm/sample.h"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "bundlecopy/common.h"
#include "bundlecopy/text.h"

namespace bundlecopy::lm {

std::vector<int> PrefixSample::joined() const {
  std::vector<int> all = prefix;
  all.insert(all.end(), target.begin(), target.end());
  return all;
}

namespace {

std::string product_words_text(const Product& p, std::size_t k) {
  std::vector<std::string> words;
  for (std::size_t i = 0; i < p.product_words.size() && i < k; ++i) words.push_back(p.product_words[i].word);
  return text::join(words, " ");
}

}  // namespace

std::vector<int> encode_prefix(const Combination& combo, const Catalog& catalog, const Vocab& vocab,
                               const EncodeOptions& options) {
  std::vector<int> ids{kBos};
  auto append = [&](std::string_view s) {
    const auto enc = vocab.encode(s, /*allow_unknown=*/true);
    ids.insert(ids.end(), enc.begin(), enc.end());
    ids.push_back(kSep);
  };
  append(combo.topic);
  for (const auto& id : combo.products) {
    const Product& p = catalog.at(id);
    append(p.title);
    append(product_words_text(p, options.words_per_product));
  }
  if (ids.size() >= options.max_len) {
    throw Error("encode_sample: prefix of " + std::to_string(ids.size()) + " tokens exceeds max length " +
                std::to_string(options.max_len));
  }
  return ids;
}

PrefixSample encode_sample(const Combination& combo, const Catalog& catalog, std::string_view copy,
                           const Vocab& vocab, const EncodeOptions& options) {
  PrefixSample s;
  s.prefix = encode_prefix(combo, catalog, vocab, options);
  s.target = vocab.encode(copy, /*allow_unknown=*/false);
  s.target.push_back(kEos);
  if (s.size() > options.max_len) {
    throw Error("encode_sample: sample of " + std::to_string(s.size()) + " tokens exceeds max length " +
                std::to_string(options.max_len));
  }
  return s;
}

std::vector<std::string> prefix_texts(const Catalog& catalog) {
  std::vector<std::string> out;
  for (const auto& p : catalog.products()) {
    out.push_back(p.title);
    if (p.topic) out.push_back(*p.topic);
    for (const auto& w : p.product_words) out.push_back(w.word);
  }
  out.push_back(" ");
  return out;
}

CorruptedPrefix corrupt_input(std::span<const int> prefix, double ratio, std::uint64_t seed) {
  if (!(ratio > 0.0 && ratio < 1.0)) throw Error("corrupt_input: ratio must lie in (0, 1)");
  std::vector<std::size_t> eligible;
  for (std::size_t i = 0; i < prefix.size(); ++i) {
    if (!is_special(prefix[i])) eligible.push_back(i);
  }
  if (eligible.empty()) throw Error("corrupt_input: prefix has no maskable tokens");
  const auto count = static_cast<std::size_t>(std::ceil(ratio * static_cast<double>(eligible.size()) - 1e-12));
  Rng rng(seed);
  for (std::size_t i = 0; i < count; ++i) std::swap(eligible[i], eligible[i + rng.index(eligible.size() - i)]);
  eligible.resize(count);
  std::sort(eligible.begin(), eligible.end());

  CorruptedPrefix out{{prefix.begin(), prefix.end()}, {}};
  for (std::size_t pos : eligible) {
    out.targets.emplace_back(pos, out.tokens[pos]);
    out.tokens[pos] = kMask;
  }
  return out;
}

std::vector<int> restore(const CorruptedPrefix& corrupted) {
  std::vector<int> tokens = corrupted.tokens;
  for (const auto& [pos, id] : corrupted.targets) tokens.at(pos) = id;
  return tokens;
}

}  // namespace bundlecopy::lm
