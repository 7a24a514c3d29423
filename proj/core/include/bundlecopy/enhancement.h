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

#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "bundlecopy/catalog.h"
#include "bundlecopy/product_words.h"

namespace bundlecopy {

/// A forbidden pattern. `pattern` is either a literal or a template with one
/// `*` gap that matches 1..max_gap non-space, non-punctuation characters.
struct LexiconEntry {
  std::string pattern;
  bool alterable = false;
  std::optional<std::string> replacement;
  std::size_t max_gap = 8;
};

class ForbiddenLexicon {
 public:
  ForbiddenLexicon() = default;
  explicit ForbiddenLexicon(std::vector<LexiconEntry> entries);

  std::span<const LexiconEntry> entries() const { return entries_; }

  // One JSON object per line: {pattern, alterable, replacement?, max_gap?}.
  static ForbiddenLexicon parse(std::string_view jsonl);
  static ForbiddenLexicon load(const std::filesystem::path& path);
  std::string serialize() const;

  // Length in code points of the entry's match starting at `pos`, 0 if none.
  std::size_t match_at(std::size_t entry, const std::u32string& text, std::size_t pos) const;
  // Index of the first entry matching anywhere (optionally only non-alterable).
  std::optional<std::size_t> find_any(const std::u32string& text, bool non_alterable_only) const;

 private:
  struct Compiled {
    std::u32string prefix;
    std::u32string suffix;
    bool wildcard = false;
  };
  std::vector<LexiconEntry> entries_;
  std::vector<Compiled> compiled_;
};

enum class ForbiddenStatus { clean, altered, dropped };
std::string_view to_string(ForbiddenStatus s);

struct FilterOutcome {
  bool keep = true;
  std::string text;    // filtered text when kept
  std::string reason;  // offending pattern when dropped
  bool altered = false;
};

FilterOutcome filter_forbidden(std::string_view text, const ForbiddenLexicon& lexicon);

struct EnhancementConfig {
  std::size_t min_per_product = 1;
  std::size_t top_k = 3;
  std::size_t min_extra_tokens = 5;
};

bool check_coverage(std::string_view copy, const Combination& combo, const Catalog& catalog,
                    const ProductWordModel& word_model, std::size_t min_per_product, std::size_t top_k = 3);

bool check_creative(std::string_view copy, const Combination& combo, const Catalog& catalog,
                    std::size_t min_extra_tokens);

// Number of copy tokens absent from every title and attribute value.
std::size_t count_extra_tokens(std::string_view copy, const Combination& combo, const Catalog& catalog);

struct Verdict {
  std::size_t record = 0;
  ForbiddenStatus forbidden = ForbiddenStatus::clean;
  bool coverage = false;
  bool creative = false;
  bool approved = false;
  std::string reason;

  bool operator==(const Verdict&) const = default;
};

struct Assessment {
  Verdict verdict;
  std::string text;  // copy after alterable substitutions
};

Assessment assess_copy(std::string_view copy, const Combination& combo, const Catalog& catalog,
                       const ForbiddenLexicon& lexicon, const ProductWordModel& word_model,
                       const EnhancementConfig& config = {});

struct EnhancementReport {
  std::vector<Verdict> verdicts;
  std::size_t approved = 0;
  double approval_rate = 0.0;

  std::size_t total() const { return verdicts.size(); }
  // Tab-separated verdict rows followed by a summary line.
  std::string to_tsv() const;
};

std::pair<std::vector<CopywritingRecord>, EnhancementReport> enhance_dataset(
    std::span<const CopywritingRecord> records, const Catalog& catalog, const ForbiddenLexicon& lexicon,
    const ProductWordModel& word_model, const EnhancementConfig& config = {});

}  // namespace bundlecopy
