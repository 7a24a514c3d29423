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

#include "bundlecopy/lm/vocab.h"

#include <algorithm>

#include "bundlecopy/common.h"
#include "bundlecopy/text.h"

namespace bundlecopy::lm {

namespace {

const std::vector<std::string>& special_names() {
  static const std::vector<std::string> names = {"<pad>", "<bos>", "<eos>", "<sep>", "<mask>", "<unk>"};
  return names;
}

}  // namespace

Vocab Vocab::from_tokens(std::vector<std::string> tokens) {
  Vocab v;
  v.tokens_ = special_names();
  for (auto& t : tokens) v.tokens_.push_back(std::move(t));
  for (std::size_t i = 0; i < v.tokens_.size(); ++i) {
    if (!v.ids_.emplace(v.tokens_[i], static_cast<int>(i)).second) {
      throw Error("vocab: duplicate token '" + v.tokens_[i] + "'");
    }
  }
  return v;
}

Vocab Vocab::build(std::span<const std::string> corpus, const VocabConfig& config) {
  if (corpus.empty()) throw Error("build_vocab: empty corpus");
  std::map<char32_t, std::size_t> counts;
  for (const auto& line : corpus) {
    for (char32_t cp : text::decode_utf8(line)) ++counts[cp];
  }
  std::vector<std::pair<char32_t, std::size_t>> ranked(counts.begin(), counts.end());
  std::stable_sort(ranked.begin(), ranked.end(), [](const auto& a, const auto& b) { return a.second > b.second; });
  std::vector<std::string> tokens;
  for (const auto& [cp, n] : ranked) {
    if (n < config.min_count) continue;
    if (config.max_size && tokens.size() + kNumSpecial >= config.max_size) break;
    std::string t = text::encode_utf8(cp);
    if (std::find(special_names().begin(), special_names().end(), t) != special_names().end()) continue;
    tokens.push_back(std::move(t));
  }
  return from_tokens(std::move(tokens));
}

std::optional<int> Vocab::find(std::string_view token) const {
  auto it = ids_.find(token);
  if (it == ids_.end()) return std::nullopt;
  return it->second;
}

const std::string& Vocab::token(int id) const {
  if (id < 0 || static_cast<std::size_t>(id) >= tokens_.size()) throw Error("vocab: id out of range");
  return tokens_[static_cast<std::size_t>(id)];
}

std::vector<std::string> Vocab::regular_tokens() const {
  return {tokens_.begin() + kNumSpecial, tokens_.end()};
}

std::vector<int> Vocab::encode(std::string_view s, bool allow_unknown) const {
  std::vector<int> ids;
  for (char32_t cp : text::decode_utf8(s)) {
    const std::string ch = text::encode_utf8(cp);
    auto it = ids_.find(ch);
    if (it == ids_.end() || it->second < kNumSpecial) {
      if (!allow_unknown) throw Error("vocab: character '" + ch + "' is not in the vocabulary");
      ids.push_back(kUnk);
    } else {
      ids.push_back(it->second);
    }
  }
  return ids;
}

std::string Vocab::decode(std::span<const int> ids) const {
  std::string out;
  for (int id : ids) {
    if (is_special(id)) continue;
    out += token(id);
  }
  return out;
}

}  // namespace bundlecopy::lm
