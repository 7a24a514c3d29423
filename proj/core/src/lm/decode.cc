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

#include "bundlecopy/lm/decode.h"

#include <algorithm>
#include <cmath>

#include "bundlecopy/common.h"
#include "bundlecopy/lm/vocab.h"

namespace bundlecopy::lm {

namespace {

std::size_t horizon(const Model& model, std::span<const int> prefix, const DecodeConfig& config) {
  if (prefix.empty()) throw Error("generate: empty prefix");
  const auto max_len = static_cast<std::size_t>(model.config.max_len);
  if (prefix.size() >= max_len) throw Error("generate: prefix does not fit the model max length");
  return std::min(config.max_output_len, max_len - prefix.size());
}

Eigen::VectorXd next_log_probs(const Model& model, std::span<const int> prefix, const std::vector<int>& generated) {
  std::vector<int> seq(prefix.begin(), prefix.end());
  seq.insert(seq.end(), generated.begin(), generated.end());
  return last_log_probs(model, seq, prefix.size());
}

bool better(const Hypothesis& a, const Hypothesis& b) {
  if (a.score != b.score) return a.score > b.score;
  return a.tokens.size() < b.tokens.size();
}

}  // namespace

bool generatable(int id) { return id == kEos || !is_special(id); }

double normalized_score(double log_prob, std::size_t length, double alpha) {
  if (length == 0) return log_prob;
  return log_prob / std::pow(static_cast<double>(length), alpha);
}

Hypothesis greedy_decode(const Model& model, std::span<const int> prefix, const DecodeConfig& config) {
  const std::size_t limit = horizon(model, prefix, config);
  Hypothesis h;
  while (h.tokens.size() < limit) {
    const Eigen::VectorXd lp = next_log_probs(model, prefix, h.tokens);
    int best = -1;
    for (int id = 0; id < lp.size(); ++id) {
      if (generatable(id) && (best < 0 || lp(id) > lp(best))) best = id;
    }
    h.tokens.push_back(best);
    h.log_prob += lp(best);
    if (best == kEos) break;
  }
  h.score = normalized_score(h.log_prob, h.tokens.size(), config.length_alpha);
  return h;
}

Hypothesis generate_beam(const Model& model, std::span<const int> prefix, const DecodeConfig& config) {
  if (config.beam_size < 1) throw Error("generate_beam: beam size must be >= 1");
  const std::size_t limit = horizon(model, prefix, config);

  struct Candidate {
    std::size_t parent;
    int token;
    double log_prob;
  };
  std::vector<Hypothesis> live{Hypothesis{}};
  std::vector<Hypothesis> finished;
  for (std::size_t step = 0; step < limit && !live.empty(); ++step) {
    std::vector<Candidate> candidates;
    for (std::size_t b = 0; b < live.size(); ++b) {
      const Eigen::VectorXd lp = next_log_probs(model, prefix, live[b].tokens);
      for (int id = 0; id < lp.size(); ++id) {
        if (generatable(id)) candidates.push_back({b, id, live[b].log_prob + lp(id)});
      }
    }
    // Same length everywhere, so raw log-probability ranks like the normalised score.
    const std::size_t keep = std::min(config.beam_size, candidates.size());
    std::partial_sort(candidates.begin(), candidates.begin() + static_cast<std::ptrdiff_t>(keep), candidates.end(),
                      [](const Candidate& a, const Candidate& b) {
                        if (a.log_prob != b.log_prob) return a.log_prob > b.log_prob;
                        if (a.parent != b.parent) return a.parent < b.parent;
                        return a.token < b.token;
                      });
    std::vector<Hypothesis> next;
    for (std::size_t c = 0; c < keep; ++c) {
      Hypothesis h;
      h.tokens = live[candidates[c].parent].tokens;
      h.tokens.push_back(candidates[c].token);
      h.log_prob = candidates[c].log_prob;
      h.score = normalized_score(h.log_prob, h.tokens.size(), config.length_alpha);
      (candidates[c].token == kEos ? finished : next).push_back(std::move(h));
    }
    live = std::move(next);
  }
  for (auto& h : live) finished.push_back(std::move(h));  // hit the length limit
  if (config.beam_size > 1) finished.push_back(greedy_decode(model, prefix, config));

  return *std::min_element(finished.begin(), finished.end(),
                           [](const Hypothesis& a, const Hypothesis& b) { return better(a, b); });
}

std::vector<int> strip_eos(const Hypothesis& h) {
  std::vector<int> out = h.tokens;
  if (!out.empty() && out.back() == kEos) out.pop_back();
  return out;
}

}  // namespace bundlecopy::lm
