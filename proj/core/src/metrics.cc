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

#include "bundlecopy/metrics.h"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <map>

#include "bundlecopy/common.h"
#include "bundlecopy/text.h"

namespace bundlecopy::metrics {

namespace {

using NgramCounts = std::map<std::vector<std::string>, std::size_t>;

NgramCounts ngrams(const Tokens& t, int n) {
  NgramCounts out;
  const auto un = static_cast<std::size_t>(n);
  for (std::size_t i = 0; i + un <= t.size(); ++i) {
    ++out[std::vector<std::string>(t.begin() + static_cast<std::ptrdiff_t>(i),
                                   t.begin() + static_cast<std::ptrdiff_t>(i + un))];
  }
  return out;
}

std::size_t total(const NgramCounts& c) {
  std::size_t s = 0;
  for (const auto& [_, v] : c) s += v;
  return s;
}

std::size_t overlap(const NgramCounts& a, const NgramCounts& b) {
  std::size_t s = 0;
  for (const auto& [g, v] : a) {
    auto it = b.find(g);
    if (it != b.end()) s += std::min(v, it->second);
  }
  return s;
}

void require_refs(std::span<const EvalPair> pairs) {
  for (const auto& p : pairs) {
    if (p.references.empty()) throw Error("metrics: every pair needs at least one reference");
  }
}

struct BleuStats {
  std::vector<double> matches, counts;
  double cand_len = 0, ref_len = 0;
};

BleuStats bleu_stats(std::span<const EvalPair> pairs, int max_n) {
  require_refs(pairs);
  BleuStats s;
  s.matches.assign(static_cast<std::size_t>(max_n), 0.0);
  s.counts.assign(static_cast<std::size_t>(max_n), 0.0);
  for (const auto& p : pairs) {
    const double c = static_cast<double>(p.candidate.size());
    double best = -1;
    for (const auto& r : p.references) {
      const double rl = static_cast<double>(r.size());
      if (best < 0 || std::abs(rl - c) < std::abs(best - c) || (std::abs(rl - c) == std::abs(best - c) && rl < best)) {
        best = rl;
      }
    }
    s.cand_len += c;
    s.ref_len += best;
    for (int n = 1; n <= max_n; ++n) {
      const auto cand = ngrams(p.candidate, n);
      NgramCounts max_ref;
      for (const auto& r : p.references) {
        for (const auto& [g, v] : ngrams(r, n)) max_ref[g] = std::max(max_ref[g], v);
      }
      s.matches[static_cast<std::size_t>(n - 1)] += static_cast<double>(overlap(cand, max_ref));
      s.counts[static_cast<std::size_t>(n - 1)] += static_cast<double>(total(cand));
    }
  }
  return s;
}

double brevity_penalty(const BleuStats& s) {
  if (s.cand_len <= 0) return 0.0;
  return s.cand_len >= s.ref_len ? 1.0 : std::exp(1.0 - s.ref_len / s.cand_len);
}

double f1(double overlap_count, double cand_total, double ref_total) {
  if (overlap_count <= 0 || cand_total <= 0 || ref_total <= 0) return 0.0;
  const double p = overlap_count / cand_total, r = overlap_count / ref_total;
  return 2 * p * r / (p + r);
}

struct ChunkSearch {
  const Tokens& cand;
  const Tokens& ref;
  std::map<std::string, std::size_t> skips_left;  // unmatched candidate slots allowed per token
  std::map<std::string, std::vector<std::size_t>> ref_positions;
  std::vector<char> used;
  std::size_t best = 0;
  std::size_t nodes = 0;
  std::size_t budget;

  void run(std::size_t i, std::ptrdiff_t prev_cand, std::ptrdiff_t prev_ref, std::size_t chunks) {
    if (++nodes > budget) return;
    if (chunks >= best) return;
    if (i == cand.size()) {
      best = chunks;
      return;
    }
    const std::string& tok = cand[i];
    auto rp = ref_positions.find(tok);
    if (rp == ref_positions.end()) {
      run(i + 1, prev_cand, prev_ref, chunks);
      return;
    }
    const bool contiguous = prev_cand == static_cast<std::ptrdiff_t>(i) - 1;
    auto try_ref = [&](std::size_t j) {
      used[j] = 1;
      const bool extends = contiguous && prev_ref + 1 == static_cast<std::ptrdiff_t>(j);
      run(i + 1, static_cast<std::ptrdiff_t>(i), static_cast<std::ptrdiff_t>(j), chunks + (extends ? 0 : 1));
      used[j] = 0;
    };
    // Continuing the current chunk first makes the first leaf a good bound.
    if (contiguous && prev_ref + 1 < static_cast<std::ptrdiff_t>(ref.size())) {
      const auto j = static_cast<std::size_t>(prev_ref + 1);
      if (!used[j] && ref[j] == tok) try_ref(j);
    }
    for (std::size_t j : rp->second) {
      if (used[j]) continue;
      if (contiguous && static_cast<std::ptrdiff_t>(j) == prev_ref + 1) continue;
      try_ref(j);
    }
    std::size_t& skip = skips_left[tok];
    if (skip > 0) {
      --skip;
      run(i + 1, prev_cand, prev_ref, chunks);
      ++skip;
    }
  }
};

}  // namespace

std::size_t lcs_length(const Tokens& a, const Tokens& b) {
  std::vector<std::size_t> prev(b.size() + 1, 0), cur(b.size() + 1, 0);
  for (std::size_t i = 1; i <= a.size(); ++i) {
    for (std::size_t j = 1; j <= b.size(); ++j) {
      cur[j] = a[i - 1] == b[j - 1] ? prev[j - 1] + 1 : std::max(prev[j], cur[j - 1]);
    }
    std::swap(prev, cur);
  }
  return prev[b.size()];
}

std::size_t min_chunks(const Tokens& candidate, const Tokens& reference, std::size_t node_budget) {
  ChunkSearch s{candidate, reference, {}, {}, std::vector<char>(reference.size(), 0), 0, 0, node_budget};
  std::map<std::string, std::size_t> cand_count, ref_count;
  for (const auto& t : candidate) ++cand_count[t];
  for (std::size_t j = 0; j < reference.size(); ++j) {
    ++ref_count[reference[j]];
    s.ref_positions[reference[j]].push_back(j);
  }
  std::size_t matches = 0;
  for (const auto& [t, c] : cand_count) {
    auto it = ref_count.find(t);
    const std::size_t r = it == ref_count.end() ? 0 : it->second;
    matches += std::min(c, r);
    if (r > 0) s.skips_left[t] = c > r ? c - r : 0;
  }
  if (matches == 0) return 0;
  s.best = matches + 1;  // chunks never exceed matches
  s.run(0, -2, -2, 0);
  return s.best;
}

double bleu_n(std::span<const EvalPair> pairs, int n) {
  if (n < 1) throw Error("bleu_n: n must be >= 1");
  if (pairs.empty()) return 0.0;
  const BleuStats s = bleu_stats(pairs, n);
  double log_sum = 0;
  for (int k = 0; k < n; ++k) {
    const auto uk = static_cast<std::size_t>(k);
    if (s.counts[uk] <= 0 || s.matches[uk] <= 0) return 0.0;
    log_sum += std::log(s.matches[uk] / s.counts[uk]);
  }
  return 100.0 * brevity_penalty(s) * std::exp(log_sum / n);
}

double sacrebleu_like(std::span<const EvalPair> pairs) {
  if (pairs.empty()) return 0.0;
  const BleuStats s = bleu_stats(pairs, 4);
  if (s.counts[0] <= 0 || s.matches[0] <= 0) return 0.0;
  double log_sum = std::log(s.matches[0] / s.counts[0]);
  for (std::size_t k = 1; k < 4; ++k) log_sum += std::log((s.matches[k] + 1.0) / (s.counts[k] + 1.0));
  return 100.0 * brevity_penalty(s) * std::exp(log_sum / 4.0);
}

double rouge_n(std::span<const EvalPair> pairs, int n) {
  if (n < 1) throw Error("rouge_n: n must be >= 1");
  require_refs(pairs);
  if (pairs.empty()) return 0.0;
  double sum = 0;
  for (const auto& p : pairs) {
    const auto cand = ngrams(p.candidate, n);
    double best = 0;
    for (const auto& r : p.references) {
      const auto ref = ngrams(r, n);
      best = std::max(best, f1(static_cast<double>(overlap(cand, ref)), static_cast<double>(total(cand)),
                               static_cast<double>(total(ref))));
    }
    sum += best;
  }
  return 100.0 * sum / static_cast<double>(pairs.size());
}

double rouge_l(std::span<const EvalPair> pairs) {
  require_refs(pairs);
  if (pairs.empty()) return 0.0;
  double sum = 0;
  for (const auto& p : pairs) {
    double best = 0;
    for (const auto& r : p.references) {
      best = std::max(best, f1(static_cast<double>(lcs_length(p.candidate, r)),
                               static_cast<double>(p.candidate.size()), static_cast<double>(r.size())));
    }
    sum += best;
  }
  return 100.0 * sum / static_cast<double>(pairs.size());
}

double meteor_simplified(std::span<const EvalPair> pairs) {
  require_refs(pairs);
  if (pairs.empty()) return 0.0;
  double sum = 0;
  for (const auto& p : pairs) {
    double best = 0;
    for (const auto& r : p.references) {
      const double m = static_cast<double>(overlap(ngrams(p.candidate, 1), ngrams(r, 1)));
      if (m <= 0) continue;
      const double precision = m / static_cast<double>(p.candidate.size());
      const double recall = m / static_cast<double>(r.size());
      const double fmean = 10 * precision * recall / (recall + 9 * precision);
      const double frag = static_cast<double>(min_chunks(p.candidate, r)) / m;
      best = std::max(best, fmean * (1.0 - 0.5 * frag * frag * frag));
    }
    sum += best;
  }
  return 100.0 * sum / static_cast<double>(pairs.size());
}

std::string MetricReport::header(char delimiter) const {
  std::string out;
  for (std::size_t i = 0; i < kColumns.size(); ++i) {
    if (i) out += delimiter;
    out += kColumns[i];
  }
  return out;
}

std::string MetricReport::row(char delimiter, int precision) const {
  std::string out;
  const auto v = values();
  for (std::size_t i = 0; i < v.size(); ++i) {
    if (i) out += delimiter;
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.*f", precision, v[i]);
    out += buf;
  }
  return out;
}

MetricReport evaluate_pairs(std::span<const EvalPair> pairs) {
  MetricReport r;
  r.sacrebleu = sacrebleu_like(pairs);
  r.rouge1 = rouge_n(pairs, 1);
  r.rouge2 = rouge_n(pairs, 2);
  r.rougel = rouge_l(pairs);
  r.bleu1 = bleu_n(pairs, 1);
  r.bleu4 = bleu_n(pairs, 4);
  r.meteor = meteor_simplified(pairs);
  return r;
}

MetricReport evaluate_suite(std::span<const std::string> candidates, std::span<const std::string> references) {
  if (candidates.size() != references.size()) {
    throw Error("evaluate_suite: " + std::to_string(candidates.size()) + " candidates vs " +
                std::to_string(references.size()) + " references");
  }
  std::vector<EvalPair> pairs;
  pairs.reserve(candidates.size());
  for (std::size_t i = 0; i < candidates.size(); ++i) {
    pairs.push_back({text::tokenize(candidates[i]), {text::tokenize(references[i])}});
  }
  return evaluate_pairs(pairs);
}

}  // namespace bundlecopy::metrics
