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

#include <gtest/gtest.h>

#include "bundlecopy/common.h"
#include "bundlecopy/text.h"
#include "fixtures.h"
#include "oracles.h"

namespace m = bundlecopy::metrics;

namespace {

m::Tokens toks(const std::string& s) {
  m::Tokens out;
  std::string cur;
  for (char c : s + " ") {
    if (c == ' ') {
      if (!cur.empty()) out.push_back(cur);
      cur.clear();
    } else {
      cur += c;
    }
  }
  return out;
}

std::vector<m::EvalPair> one(const std::string& cand, const std::string& ref) {
  return {{toks(cand), {toks(ref)}}};
}

}  // namespace

TEST(Metrics, IdentityScoresHundred) {
  const auto p = one("a b c d e", "a b c d e");
  EXPECT_DOUBLE_EQ(m::bleu_n(p, 1), 100.0);
  EXPECT_DOUBLE_EQ(m::bleu_n(p, 4), 100.0);
  EXPECT_DOUBLE_EQ(m::sacrebleu_like(p), 100.0);
  EXPECT_DOUBLE_EQ(m::rouge_n(p, 1), 100.0);
  EXPECT_DOUBLE_EQ(m::rouge_n(p, 2), 100.0);
  EXPECT_DOUBLE_EQ(m::rouge_l(p), 100.0);
}

TEST(Metrics, HandCountedExamples) {
  EXPECT_DOUBLE_EQ(m::bleu_n(one("a b", "a c"), 1), 50.0);
  EXPECT_NEAR(m::rouge_l(one("a b c d", "a c d")), 100.0 * 2 * 0.75 / 1.75, 1e-12);
  EXPECT_NEAR(m::meteor_simplified(one("a b c d", "a b c d")), 100.0 * (1 - 0.5 / 64.0), 1e-12);
  EXPECT_EQ(m::bleu_n(one("a b", "c d"), 1), 0.0);
  EXPECT_EQ(m::meteor_simplified(one("a b", "c d")), 0.0);
}

TEST(Metrics, SmoothingKeepsShortCandidatePositive) {
  const auto p = one("a b c", "a b c");
  EXPECT_EQ(m::bleu_n(p, 4), 0.0);
  // p1 = 3/3, p2 = (2+1)/(2+1), p3 = (1+1)/(1+1), p4 = (0+1)/(0+1).
  EXPECT_NEAR(m::sacrebleu_like(p), 100.0, 1e-12);
  const auto q = one("a b x", "a b c");
  // p1 = 2/3, p2 = 2/3, p3 = 1/2, p4 = 1/1.
  EXPECT_NEAR(m::sacrebleu_like(q), 100.0 * std::pow(2.0 / 3 * 2.0 / 3 * 0.5, 0.25), 1e-12);
}

TEST(Metrics, BrevityPenaltyAndClosestReference) {
  const std::vector<m::EvalPair> p = {{toks("a b"), {toks("a b c d"), toks("a b c d e f")}}};
  EXPECT_NEAR(m::bleu_n(p, 1), 100.0 * std::exp(1.0 - 4.0 / 2.0), 1e-12);
}

TEST(Metrics, LongerNThanCandidateIsZeroNotError) {
  EXPECT_EQ(m::bleu_n(one("a", "a"), 4), 0.0);
  EXPECT_THROW(m::bleu_n(one("a", "a"), 0), bundlecopy::Error);
  EXPECT_THROW(m::rouge_n(one("a", "a"), 0), bundlecopy::Error);
  const std::vector<m::EvalPair> no_ref = {{toks("a"), {}}};
  EXPECT_THROW(m::rouge_l(no_ref), bundlecopy::Error);
}

TEST(MetricsOracle, AgreeOnRandomPairs) {
  for (std::uint64_t seed = 1; seed <= 4; ++seed) {
    const auto pairs = oracle::random_pairs(seed, 50, 12, 4, 2);
    for (int n = 1; n <= 4; ++n) {
      EXPECT_NEAR(m::bleu_n(pairs, n), oracle::bleu(pairs, n, false), 1e-9) << n;
      EXPECT_NEAR(m::rouge_n(pairs, n), oracle::rouge_n(pairs, n), 1e-9) << n;
    }
    EXPECT_NEAR(m::sacrebleu_like(pairs), oracle::bleu(pairs, 4, true), 1e-9);
    EXPECT_NEAR(m::rouge_l(pairs), oracle::rouge_l(pairs), 1e-9);
    EXPECT_NEAR(m::meteor_simplified(pairs), oracle::meteor(pairs), 1e-9);
    for (const auto& p : pairs) {
      const std::span<const m::EvalPair> single(&p, 1);
      EXPECT_NEAR(m::bleu_n(single, 2), oracle::bleu(single, 2, false), 1e-9);
      EXPECT_NEAR(m::meteor_simplified(single), oracle::meteor(single), 1e-9);
    }
  }
}

TEST(MetricsOracle, LcsAndChunks) {
  bundlecopy::Rng rng(12);
  for (const auto& p : oracle::random_pairs(7, 200, 12, 3, 1)) {
    const auto& r = p.references.front();
    EXPECT_EQ(m::lcs_length(p.candidate, r), oracle::lcs_by_subsets(p.candidate, r));
    const auto [matches, chunks] = oracle::best_alignment(p.candidate, r);
    if (matches > 0) EXPECT_EQ(m::min_chunks(p.candidate, r), chunks);
  }
}

TEST(Metrics, ScoresStayInRange) {
  const auto pairs = oracle::random_pairs(99, 100, 12, 6, 3);
  const auto report = m::evaluate_pairs(pairs);
  for (double v : report.values()) {
    EXPECT_GE(v, 0.0);
    EXPECT_LE(v, 100.0);
  }
}

TEST(Metrics, ShowcaseTextsThroughSuite) {
  const auto& t = fixtures::showcase();
  const std::vector<std::string> cand = {t.sofa_generated, t.filter_generated};
  const std::vector<std::string> ref = {t.sofa_original, t.filter_original};
  const auto report = m::evaluate_suite(cand, ref);
  for (double v : report.values()) {
    EXPECT_GE(v, 0.0);
    EXPECT_LE(v, 100.0);
  }
  EXPECT_GT(report.rouge1, 0.0);
  EXPECT_THROW(m::evaluate_suite(cand, std::vector<std::string>{"x"}), bundlecopy::Error);
}

TEST(Metrics, ReportColumnsAndOrder) {
  const m::MetricReport r{};
  EXPECT_EQ(r.header('\t'), "SacreBLEU\tROUGE-1\tROUGE-2\tROUGE-L\tBLEU-1\tBLEU-4\tMETEOR-simplified");
  EXPECT_EQ(r.row(',', 1), "0.0,0.0,0.0,0.0,0.0,0.0,0.0");
}
