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

#include "bundlecopy/lm/train.h"

#include <cmath>

#include "bundlecopy/common.h"

namespace bundlecopy::lm {

namespace {

void for_each_pair(Params& a, const Params& b, const std::function<void(Matrix&, const Matrix&)>& fn) {
  std::vector<Matrix*> lhs;
  std::vector<const Matrix*> rhs;
  a.visit([&](const std::string&, Matrix& t) { lhs.push_back(&t); });
  b.visit([&](const std::string&, const Matrix& t) { rhs.push_back(&t); });
  for (std::size_t i = 0; i < lhs.size(); ++i) fn(*lhs[i], *rhs[i]);
}

double global_norm(const Params& g) {
  double s = 0.0;
  g.visit([&](const std::string&, const Matrix& t) { s += t.squaredNorm(); });
  return std::sqrt(s);
}

std::vector<int> model_input(const std::vector<int>& prefix, const std::vector<int>& target) {
  std::vector<int> in = prefix;
  if (!target.empty()) in.insert(in.end(), target.begin(), target.end() - 1);
  return in;
}

}  // namespace

void TrainConfig::validate() const {
  if (!(corruption_ratio > 0.0 && corruption_ratio < 1.0)) throw Error("train config: corruption ratio must lie in (0,1)");
  if (steps < 1) throw Error("train config: steps must be >= 1");
  if (batch_size < 1) throw Error("train config: batch size must be >= 1");
  if (!(learning_rate > 0.0)) throw Error("train config: learning rate must be positive");
  if (reconstruction_weight < 0.0 || autoregressive_weight < 0.0) throw Error("train config: negative objective weight");
}

std::string_view to_string(Optimizer o) { return o == Optimizer::sgd ? "sgd" : "adam"; }

Optimizer parse_optimizer(std::string_view s) {
  if (s == "sgd") return Optimizer::sgd;
  if (s == "adam") return Optimizer::adam;
  throw Error("unknown optimizer '" + std::string(s) + "'");
}

double batch_loss(const Model& model, std::span<const PrefixSample> batch, const TrainConfig& config, Mode mode,
                  std::uint64_t step_seed, Params* grad) {
  if (batch.empty()) throw Error("train_step: empty batch");
  struct Prepared {
    std::vector<int> input;
    std::size_t prefix_len;
    std::vector<std::pair<std::size_t, int>> masked;
    const PrefixSample* sample;
  };
  std::vector<Prepared> prepared;
  std::size_t n_masked = 0, n_target = 0;
  for (std::size_t i = 0; i < batch.size(); ++i) {
    const PrefixSample& s = batch[i];
    if (s.prefix.empty() || s.target.empty()) throw Error("train_step: sample needs a prefix and a target");
    Prepared p{model_input(s.prefix, s.target), s.prefix.size(), {}, &s};
    if (mode == Mode::pretrain && config.reconstruction_weight > 0.0) {
      auto c = corrupt_input(s.prefix, config.corruption_ratio, mix_seed(step_seed, i));
      std::copy(c.tokens.begin(), c.tokens.end(), p.input.begin());
      p.masked = std::move(c.targets);
    }
    n_masked += p.masked.size();
    n_target += s.target.size();
    prepared.push_back(std::move(p));
  }

  const double w_ar = mode == Mode::pretrain ? config.autoregressive_weight : 1.0;
  const double w_rec = mode == Mode::pretrain ? config.reconstruction_weight : 0.0;
  double loss = 0.0;
  for (const auto& p : prepared) {
    std::vector<Target> targets;
    for (std::size_t k = 0; k < p.sample->target.size(); ++k) {
      targets.push_back({static_cast<int>(p.prefix_len - 1 + k), p.sample->target[k],
                         w_ar / static_cast<double>(n_target)});
    }
    if (w_rec > 0.0 && n_masked > 0) {
      for (const auto& [pos, orig] : p.masked) {
        targets.push_back({static_cast<int>(pos), orig, w_rec / static_cast<double>(n_masked)});
      }
    }
    loss += loss_and_gradient(model, p.input, p.prefix_len, targets, grad);
  }
  return loss;
}

Trainer::Trainer(Model& model, TrainConfig config) : model_(model), config_(std::move(config)) {
  config_.validate();
  if (config_.optimizer == Optimizer::adam) {
    m_ = model_.params.zeros_like();
    v_ = model_.params.zeros_like();
  }
}

StepResult Trainer::step(std::span<const PrefixSample> batch, Mode mode) {
  Params grad = model_.params.zeros_like();
  const double loss = batch_loss(model_, batch, config_, mode, mix_seed(config_.seed, step_), &grad);
  if (!std::isfinite(loss)) throw Error("train_step: non-finite loss (training diverged)");
  ++step_;
  const double norm = global_norm(grad);
  const double clip = (config_.clip_norm > 0.0 && norm > config_.clip_norm) ? config_.clip_norm / norm : 1.0;
  const double lr = config_.learning_rate;

  if (config_.optimizer == Optimizer::sgd) {
    for_each_pair(model_.params, grad, [&](Matrix& w, const Matrix& g) { w -= (lr * clip) * g; });
  } else {
    const double b1 = config_.adam_beta1, b2 = config_.adam_beta2;
    const double c1 = 1.0 - std::pow(b1, static_cast<double>(step_));
    const double c2 = 1.0 - std::pow(b2, static_cast<double>(step_));
    std::vector<Matrix*> ws, ms, vs;
    std::vector<const Matrix*> gs;
    model_.params.visit([&](const std::string&, Matrix& t) { ws.push_back(&t); });
    m_.visit([&](const std::string&, Matrix& t) { ms.push_back(&t); });
    v_.visit([&](const std::string&, Matrix& t) { vs.push_back(&t); });
    grad.visit([&](const std::string&, const Matrix& t) { gs.push_back(&t); });
    for (std::size_t i = 0; i < ws.size(); ++i) {
      const Matrix g = clip * *gs[i];
      *ms[i] = b1 * *ms[i] + (1.0 - b1) * g;
      *vs[i] = b2 * *vs[i] + (1.0 - b2) * g.cwiseProduct(g);
      ws[i]->array() -= lr * (ms[i]->array() / c1) / ((vs[i]->array() / c2).sqrt() + config_.adam_eps);
    }
  }
  return {loss, norm};
}

StepResult train_step(Model& model, std::span<const PrefixSample> batch, const TrainConfig& config, Mode mode,
                      std::uint64_t step_seed) {
  TrainConfig c = config;
  c.seed = step_seed;
  c.optimizer = Optimizer::sgd;
  Trainer t(model, c);
  return t.step(batch, mode);
}

PrefixSample split_sample(std::span<const int> ids, std::size_t split) {
  if (split < 1 || split >= ids.size()) throw Error("split_sample: split point out of range");
  PrefixSample s;
  s.prefix.push_back(kBos);
  s.prefix.insert(s.prefix.end(), ids.begin(), ids.begin() + static_cast<std::ptrdiff_t>(split));
  s.prefix.push_back(kSep);
  s.target.assign(ids.begin() + static_cast<std::ptrdiff_t>(split), ids.end());
  s.target.push_back(kEos);
  return s;
}

std::vector<double> pretrain(Model& model, std::span<const std::string> corpus, const Vocab& vocab,
                             const TrainConfig& config, const LossCallback& on_step) {
  if (corpus.empty()) throw Error("pretrain: empty corpus");
  const std::size_t max_chars = static_cast<std::size_t>(model.config.max_len) - 3;
  std::vector<std::vector<int>> texts;
  for (const auto& t : corpus) {
    auto ids = vocab.encode(t, /*allow_unknown=*/true);
    if (ids.size() > max_chars) ids.resize(max_chars);
    if (ids.size() >= 2) texts.push_back(std::move(ids));
  }
  if (texts.empty()) throw Error("pretrain: no corpus text has at least 2 characters");

  Trainer trainer(model, config);
  Rng rng(mix_seed(config.seed, 0x5052));
  std::vector<double> losses;
  std::vector<PrefixSample> batch;
  for (std::size_t step = 0; step < config.steps; ++step) {
    batch.clear();
    for (std::size_t b = 0; b < config.batch_size; ++b) {
      const auto& ids = texts[rng.index(texts.size())];
      batch.push_back(split_sample(ids, 1 + rng.index(ids.size() - 1)));
    }
    const double loss = trainer.step(batch, Mode::pretrain).loss;
    losses.push_back(loss);
    if (on_step) on_step(step, loss);
  }
  return losses;
}

std::vector<double> finetune(Model& model, std::span<const PrefixSample> samples, const TrainConfig& config,
                             const LossCallback& on_step) {
  if (samples.empty()) throw Error("finetune: no samples");
  Trainer trainer(model, config);
  Rng rng(mix_seed(config.seed, 0x4654));
  std::vector<double> losses;
  std::vector<PrefixSample> batch;
  for (std::size_t step = 0; step < config.steps; ++step) {
    batch.clear();
    for (std::size_t b = 0; b < config.batch_size; ++b) batch.push_back(samples[rng.index(samples.size())]);
    const double loss = trainer.step(batch, Mode::finetune).loss;
    losses.push_back(loss);
    if (on_step) on_step(step, loss);
  }
  return losses;
}

double perplexity(const Model& model, std::span<const PrefixSample> samples) {
  if (samples.empty()) throw Error("perplexity: no samples");
  double nll = 0.0;
  std::size_t count = 0;
  for (const auto& s : samples) {
    std::vector<Target> targets;
    for (std::size_t k = 0; k < s.target.size(); ++k) {
      targets.push_back({static_cast<int>(s.prefix.size() - 1 + k), s.target[k], 1.0});
    }
    nll += loss_and_gradient(model, model_input(s.prefix, s.target), s.prefix.size(), targets, nullptr);
    count += s.target.size();
  }
  return std::exp(nll / static_cast<double>(count));
}

}  // namespace bundlecopy::lm
