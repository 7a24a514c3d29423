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

#include "bundlecopy/enhancement.h"

#include <algorithm>
#include <set>
#include <sstream>

#include "bundlecopy/common.h"
#include "bundlecopy/text.h"
#include "json.hpp"

namespace bundlecopy {

using nlohmann::json;

namespace {

constexpr int kMaxRewrites = 8;

char32_t fold_ascii(char32_t c) { return (c >= 'A' && c <= 'Z') ? c + ('a' - 'A') : c; }

bool equal_at(const std::u32string& text, std::size_t pos, const std::u32string& lit) {
  if (pos + lit.size() > text.size()) return false;
  for (std::size_t i = 0; i < lit.size(); ++i) {
    if (fold_ascii(text[pos + i]) != fold_ascii(lit[i])) return false;
  }
  return true;
}

bool gap_char(char32_t c) {
  return !(c == ' ' || c == '\t' || c == '\n' || c == '\r' || c == 0x3000 || text::is_punctuation(c));
}

}  // namespace

ForbiddenLexicon::ForbiddenLexicon(std::vector<LexiconEntry> entries) : entries_(std::move(entries)) {
  for (const auto& e : entries_) {
    if (e.pattern.empty()) throw Error("lexicon: empty pattern");
    if (e.alterable && !e.replacement) throw Error("lexicon: alterable pattern '" + e.pattern + "' needs a replacement");
    if (!e.alterable && e.replacement) {
      throw Error("lexicon: non-alterable pattern '" + e.pattern + "' must not have a replacement");
    }
    const auto cps = text::decode_utf8(e.pattern);
    const auto star = std::count(cps.begin(), cps.end(), U'*');
    if (star > 1) throw Error("lexicon: pattern '" + e.pattern + "' has more than one gap");
    Compiled c;
    if (star == 1) {
      if (e.max_gap == 0) throw Error("lexicon: max_gap must be positive");
      const auto at = cps.find(U'*');
      c.prefix = cps.substr(0, at);
      c.suffix = cps.substr(at + 1);
      c.wildcard = true;
      if (c.prefix.empty() && c.suffix.empty()) throw Error("lexicon: a bare '*' pattern matches everything");
    } else {
      c.prefix = cps;
    }
    compiled_.push_back(std::move(c));
  }
}

std::size_t ForbiddenLexicon::match_at(std::size_t entry, const std::u32string& t, std::size_t pos) const {
  const Compiled& c = compiled_[entry];
  if (!equal_at(t, pos, c.prefix)) return 0;
  if (!c.wildcard) return c.prefix.size();
  const std::size_t gap_start = pos + c.prefix.size();
  std::size_t best = 0;
  for (std::size_t g = 1; g <= entries_[entry].max_gap && gap_start + g <= t.size(); ++g) {
    if (!gap_char(t[gap_start + g - 1])) break;
    if (c.suffix.empty()) {
      best = c.prefix.size() + g;  // no right anchor: take the longest gap
    } else if (equal_at(t, gap_start + g, c.suffix)) {
      return c.prefix.size() + g + c.suffix.size();
    }
  }
  return best;
}

std::optional<std::size_t> ForbiddenLexicon::find_any(const std::u32string& t, bool non_alterable_only) const {
  for (std::size_t pos = 0; pos < t.size(); ++pos) {
    for (std::size_t e = 0; e < entries_.size(); ++e) {
      if (non_alterable_only && entries_[e].alterable) continue;
      if (match_at(e, t, pos) > 0) return e;
    }
  }
  return std::nullopt;
}

ForbiddenLexicon ForbiddenLexicon::parse(std::string_view jsonl) {
  std::vector<LexiconEntry> entries;
  std::istringstream in{std::string(jsonl)};
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    try {
      const json j = json::parse(line);
      LexiconEntry e;
      e.pattern = j.at("pattern").get<std::string>();
      e.alterable = j.value("alterable", false);
      if (auto it = j.find("replacement"); it != j.end() && !it->is_null()) e.replacement = it->get<std::string>();
      e.max_gap = j.value("max_gap", std::size_t{8});
      entries.push_back(std::move(e));
    } catch (const json::exception& ex) {
      throw ParseError("<lexicon>", lineno, ex.what());
    }
  }
  return ForbiddenLexicon(std::move(entries));
}

ForbiddenLexicon ForbiddenLexicon::load(const std::filesystem::path& path) { return parse(read_file(path)); }

std::string ForbiddenLexicon::serialize() const {
  std::string out;
  for (const auto& e : entries_) {
    json j{{"pattern", e.pattern}, {"alterable", e.alterable}};
    if (e.replacement) j["replacement"] = *e.replacement;
    if (e.max_gap != 8) j["max_gap"] = e.max_gap;
    out += j.dump() + "\n";
  }
  return out;
}

std::string_view to_string(ForbiddenStatus s) {
  switch (s) {
    case ForbiddenStatus::clean: return "clean";
    case ForbiddenStatus::altered: return "altered";
    case ForbiddenStatus::dropped: return "dropped";
  }
  return "clean";
}

FilterOutcome filter_forbidden(std::string_view input, const ForbiddenLexicon& lexicon) {
  std::u32string current = text::decode_utf8(input);
  bool altered = false;
  for (int round = 0; round <= kMaxRewrites; ++round) {
    if (auto hit = lexicon.find_any(current, /*non_alterable_only=*/true)) {
      FilterOutcome out{false, std::string(input), lexicon.entries()[*hit].pattern, altered};
      if (altered) out.reason += " (after substitution)";
      return out;
    }
    // Left to right; at each position the longest alterable match wins.
    std::u32string next;
    bool changed = false;
    std::size_t pos = 0;
    while (pos < current.size()) {
      std::size_t best_len = 0, best_entry = 0;
      for (std::size_t e = 0; e < lexicon.entries().size(); ++e) {
        if (!lexicon.entries()[e].alterable) continue;
        const std::size_t len = lexicon.match_at(e, current, pos);
        if (len > best_len) {
          best_len = len;
          best_entry = e;
        }
      }
      if (best_len > 0) {
        next += text::decode_utf8(*lexicon.entries()[best_entry].replacement);
        pos += best_len;
        changed = true;
      } else {
        next.push_back(current[pos++]);
      }
    }
    if (!changed) return {true, text::encode_utf8(current), {}, altered};
    altered = true;
    current = std::move(next);
  }
  return {false, std::string(input), "substitutions did not converge", true};
}

bool check_coverage(std::string_view copy, const Combination& combo, const Catalog& catalog,
                    const ProductWordModel& word_model, std::size_t min_per_product, std::size_t top_k) {
  const auto tokens = text::tokenize(copy);
  for (const auto& id : combo.products) {
    const Product& p = catalog.at(id);
    auto words = word_model.predict(p);
    if (words.size() > top_k) words.resize(top_k);
    std::size_t hits = 0;
    for (const auto& w : words) {
      if (text::contains_tokens(tokens, text::tokenize(w.word))) ++hits;
    }
    if (hits < min_per_product) return false;
  }
  return true;
}

std::size_t count_extra_tokens(std::string_view copy, const Combination& combo, const Catalog& catalog) {
  std::set<std::string> known;
  for (const auto& id : combo.products) {
    const Product* p = catalog.find(id);
    if (!p) continue;
    for (auto& t : text::tokenize(p->title)) known.insert(std::move(t));
    for (const auto& [_, v] : p->attributes) {
      for (auto& t : text::tokenize(v)) known.insert(std::move(t));
    }
  }
  std::size_t extra = 0;
  for (const auto& t : text::tokenize(copy)) {
    if (!known.contains(t)) ++extra;
  }
  return extra;
}

bool check_creative(std::string_view copy, const Combination& combo, const Catalog& catalog,
                    std::size_t min_extra_tokens) {
  return count_extra_tokens(copy, combo, catalog) >= min_extra_tokens;
}

Assessment assess_copy(std::string_view copy, const Combination& combo, const Catalog& catalog,
                       const ForbiddenLexicon& lexicon, const ProductWordModel& word_model,
                       const EnhancementConfig& config) {
  Assessment a;
  const FilterOutcome f = filter_forbidden(copy, lexicon);
  a.text = f.keep ? f.text : std::string(copy);
  a.verdict.forbidden = !f.keep ? ForbiddenStatus::dropped : (f.altered ? ForbiddenStatus::altered : ForbiddenStatus::clean);
  a.verdict.coverage = check_coverage(a.text, combo, catalog, word_model, config.min_per_product, config.top_k);
  a.verdict.creative = check_creative(a.text, combo, catalog, config.min_extra_tokens);
  a.verdict.approved = a.verdict.forbidden != ForbiddenStatus::dropped && a.verdict.coverage && a.verdict.creative;
  std::vector<std::string> reasons;
  if (!f.keep) reasons.push_back("forbidden pattern: " + f.reason);
  if (!a.verdict.coverage) reasons.push_back("limited product coverage");
  if (!a.verdict.creative) reasons.push_back("too simple");
  a.verdict.reason = text::join(reasons, "; ");
  return a;
}

std::string EnhancementReport::to_tsv() const {
  std::string out = "record\tforbidden\tcoverage\tcreative\tapproved\treason\n";
  for (const auto& v : verdicts) {
    out += std::to_string(v.record) + "\t" + std::string(to_string(v.forbidden)) + "\t" +
           (v.coverage ? "pass" : "fail") + "\t" + (v.creative ? "pass" : "fail") + "\t" +
           (v.approved ? "yes" : "no") + "\t" + v.reason + "\n";
  }
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.6f", approval_rate);
  out += "# approved=" + std::to_string(approved) + " total=" + std::to_string(total()) + " approval_rate=" + buf + "\n";
  return out;
}

std::pair<std::vector<CopywritingRecord>, EnhancementReport> enhance_dataset(
    std::span<const CopywritingRecord> records, const Catalog& catalog, const ForbiddenLexicon& lexicon,
    const ProductWordModel& word_model, const EnhancementConfig& config) {
  std::vector<CopywritingRecord> cleaned;
  EnhancementReport report;
  for (std::size_t i = 0; i < records.size(); ++i) {
    Assessment a = assess_copy(records[i].content, records[i].combination, catalog, lexicon, word_model, config);
    a.verdict.record = i;
    if (a.verdict.approved) {
      CopywritingRecord r = records[i];
      r.content = std::move(a.text);
      cleaned.push_back(std::move(r));
      ++report.approved;
    }
    report.verdicts.push_back(std::move(a.verdict));
  }
  report.approval_rate =
      records.empty() ? 0.0 : static_cast<double>(report.approved) / static_cast<double>(records.size());
  return {std::move(cleaned), std::move(report)};
}

}  // namespace bundlecopy
