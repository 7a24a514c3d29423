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

#include <span>
#include <vector>

#include "bundlecopy/lm/model.h"

namespace bundlecopy::lm {

struct DecodeConfig {
  std::size_t beam_size = 3;
  std::size_t max_output_len = 64;
  double length_alpha = 0.7;  // score = log p / length^alpha
};

struct Hypothesis {
  std::vector<int> tokens;  // generated ids, EOS included when finished by it
  double log_prob = 0.0;
  double score = 0.0;
};

// Whether the decoder may emit `id` (regular tokens and EOS).
bool generatable(int id);

double normalized_score(double log_prob, std::size_t length, double alpha);

Hypothesis greedy_decode(const Model& model, std::span<const int> prefix, const DecodeConfig& config);

// Length-normalised beam search over positions after the prefix. The greedy
// hypothesis always competes, so the result never scores below it.
Hypothesis generate_beam(const Model& model, std::span<const int> prefix, const DecodeConfig& config);

// Generated ids with a trailing EOS removed.
std::vector<int> strip_eos(const Hypothesis& h);

}  // namespace bundlecopy::lm
