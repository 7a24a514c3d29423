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

#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace bundlecopy::lm {

// Reserved ids. UNK is never generated.
enum SpecialToken : int { kPad = 0, kBos = 1, kEos = 2, kSep = 3, kMask = 4, kUnk = 5 };
inline constexpr int kNumSpecial = 6;

inline bool is_special(int id) { return id >= 0 && id < kNumSpecial; }

struct VocabConfig {
  std::size_t min_count = 1;
  std::size_t max_size = 0;  // 0 = unlimited
};

/// Character-level vocabulary; ids after the specials are ordered by
/// descending frequency, then code point.
class Vocab {
 public:
  static Vocab build(std::span<const std::string> corpus, const VocabConfig& config = {});
  // Non-special tokens in id order (ids start at kNumSpecial).
  static Vocab from_tokens(std::vector<std::string> tokens);

  std::optional<int> find(std::string_view token) const;
  const std::string& token(int id) const;
  std::size_t size() const { return tokens_.size(); }
  std::span<const std::string> tokens() const { return tokens_; }
  std::vector<std::string> regular_tokens() const;

  // Unknown characters map to kUnk when allowed, otherwise throw.
  std::vector<int> encode(std::string_view text, bool allow_unknown = false) const;
  // Special ids are skipped.
  std::string decode(std::span<const int> ids) const;

  bool operator==(const Vocab& other) const { return tokens_ == other.tokens_; }

 private:
  std::vector<std::string> tokens_;
  std::map<std::string, int, std::less<>> ids_;
};

}  // namespace bundlecopy::lm
