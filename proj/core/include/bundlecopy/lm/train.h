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

#include <cstdint>
#include <functional>
#include <span>
#include <string>
#include <vector>

#include "bundlecopy/lm/model.h"
#include "bundlecopy/lm/sample.h"
#include "bundlecopy/lm/vocab.h"

namespace bundlecopy::lm {

// pretrain: masked-prefix reconstruction + autoregressive target loss.
// finetune: autoregressive target loss only.
enum class Mode { pretrain, finetune };

enum class Optimizer { sgd, adam };

struct TrainConfig {
  double learning_rate = 0.5;
  std::size_t batch_size = 8;
  std::size_t steps = 200;
  double corruption_ratio = 0.15;
  double reconstruction_weight = 1.0;
  double autoregressive_weight = 1.0;
  double clip_norm = 1.0;  // global gradient norm cap, 0 disables
  Optimizer optimizer = Optimizer::sgd;
  double adam_beta1 = 0.9;
  double adam_beta2 = 0.999;
  double adam_eps = 1e-8;
  std::uint64_t seed = 1;

  void validate() const;
};

std::string_view to_string(Optimizer o);
Optimizer parse_optimizer(std::string_view s);

struct StepResult {
  double loss = 0.0;
  double grad_norm = 0.0;
};

// Mean masked-prefix cross-entropy (pretrain only) and mean target
// cross-entropy over the whole batch, combined with the configured weights.
// Corruption of sample i uses mix_seed(step_seed, i).
double batch_loss(const Model& model, std::span<const PrefixSample> batch, const TrainConfig& config, Mode mode,
                  std::uint64_t step_seed, Params* grad);

/// Owns optimizer state across steps; the model is updated in place.
class Trainer {
 public:
  Trainer(Model& model, TrainConfig config);

  StepResult step(std::span<const PrefixSample> batch, Mode mode);
  std::size_t steps_taken() const { return step_; }

 private:
  Model& model_;
  TrainConfig config_;
  Params m_, v_;
  std::size_t step_ = 0;
};

// One plain gradient step; throws on a non-finite loss.
StepResult train_step(Model& model, std::span<const PrefixSample> batch, const TrainConfig& config, Mode mode,
                      std::uint64_t step_seed = 0);

using LossCallback = std::function<void(std::size_t step, double loss)>;

// Splits `ids` after `split` tokens: BOS ids[:split] SEP | ids[split:] EOS.
PrefixSample split_sample(std::span<const int> ids, std::size_t split);

// Domain pretraining over raw texts, each draw split at a random point.
// Returns the per-step loss curve.
std::vector<double> pretrain(Model& model, std::span<const std::string> corpus, const Vocab& vocab,
                             const TrainConfig& config, const LossCallback& on_step = {});

std::vector<double> finetune(Model& model, std::span<const PrefixSample> samples, const TrainConfig& config,
                             const LossCallback& on_step = {});

// exp of the mean per-token target cross-entropy.
double perplexity(const Model& model, std::span<const PrefixSample> samples);

}  // namespace bundlecopy::lm
