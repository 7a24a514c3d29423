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

#include <array>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace bundlecopy::metrics {

using Tokens = std::vector<std::string>;

struct EvalPair {
  Tokens candidate;
  std::vector<Tokens> references;  // at least one
};

// All scores are corpus-level and scaled to [0, 100].

// Modified n-gram precision geometric mean over orders 1..n with brevity
// penalty (closest reference length, shorter wins ties).
double bleu_n(std::span<const EvalPair> pairs, int n);

// BLEU-4 with add-one smoothing on orders >= 2.
double sacrebleu_like(std::span<const EvalPair> pairs);

// Mean over pairs of the best-reference n-gram F1.
double rouge_n(std::span<const EvalPair> pairs, int n);
// Mean over pairs of the best-reference LCS F1.
double rouge_l(std::span<const EvalPair> pairs);

// Exact-match METEOR: recall-weighted harmonic mean (9:1) times
// (1 - 0.5 * (chunks / matches)^3), best reference per pair, mean over pairs.
// The alignment maximises matches, then minimises chunks.
double meteor_simplified(std::span<const EvalPair> pairs);

// Fewest chunks over all maximum exact-match alignments. Exact as long as the
// search finishes inside `node_budget`; best found so far otherwise.
std::size_t min_chunks(const Tokens& candidate, const Tokens& reference, std::size_t node_budget = 200000);
std::size_t lcs_length(const Tokens& a, const Tokens& b);

struct MetricReport {
  static constexpr std::array<std::string_view, 7> kColumns = {
      "SacreBLEU", "ROUGE-1", "ROUGE-2", "ROUGE-L", "BLEU-1", "BLEU-4", "METEOR-simplified"};

  double sacrebleu = 0, rouge1 = 0, rouge2 = 0, rougel = 0, bleu1 = 0, bleu4 = 0, meteor = 0;

  std::array<double, 7> values() const { return {sacrebleu, rouge1, rouge2, rougel, bleu1, bleu4, meteor}; }
  std::string header(char delimiter = '\t') const;
  std::string row(char delimiter = '\t', int precision = 2) const;
};

MetricReport evaluate_pairs(std::span<const EvalPair> pairs);
// Line-aligned candidate/reference texts, tokenized with text::tokenize.
MetricReport evaluate_suite(std::span<const std::string> candidates, std::span<const std::string> references);

}  // namespace bundlecopy::metrics
