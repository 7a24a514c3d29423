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

#include <Eigen/Dense>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

namespace bundlecopy::lm {

using Matrix = Eigen::MatrixXd;

struct ModelConfig {
  int vocab_size = 0;
  int layers = 2;
  int width = 64;
  int heads = 4;
  int ff_width = 256;
  int max_len = 256;
  double init_scale = 0.02;
  std::uint64_t seed = 1;

  void validate() const;
  bool operator==(const ModelConfig&) const = default;
};

struct LayerParams {
  Matrix ln1_g, ln1_b;
  Matrix wq, bq, wk, bk, wv, bv, wo, bo;
  Matrix ln2_g, ln2_b;
  Matrix w1, b1, w2, b2;
};

/// Every learned tensor. Biases and layer-norm gains are 1 x k rows.
struct Params {
  Matrix tok_emb;  // vocab x width
  Matrix pos_emb;  // max_len x width
  Matrix seg_emb;  // 2 x width (prefix, target)
  std::vector<LayerParams> layers;
  Matrix lnf_g, lnf_b;
  Matrix w_out;  // width x vocab
  Matrix b_out;

  // Visits tensors in checkpoint order.
  template <typename Fn>
  void visit(Fn&& fn) {
    visit_impl(*this, fn);
  }
  template <typename Fn>
  void visit(Fn&& fn) const {
    visit_impl(*this, fn);
  }

  // Same shapes, all zero.
  Params zeros_like() const;
  std::size_t parameter_count() const;
  bool all_finite() const;

 private:
  template <typename Self, typename Fn>
  static void visit_impl(Self& self, Fn& fn) {
    fn(std::string("tok_emb"), self.tok_emb);
    fn(std::string("pos_emb"), self.pos_emb);
    fn(std::string("seg_emb"), self.seg_emb);
    for (std::size_t l = 0; l < self.layers.size(); ++l) {
      auto& L = self.layers[l];
      const std::string p = "layer" + std::to_string(l) + ".";
      fn(p + "ln1_g", L.ln1_g);
      fn(p + "ln1_b", L.ln1_b);
      fn(p + "wq", L.wq);
      fn(p + "bq", L.bq);
      fn(p + "wk", L.wk);
      fn(p + "bk", L.bk);
      fn(p + "wv", L.wv);
      fn(p + "bv", L.bv);
      fn(p + "wo", L.wo);
      fn(p + "bo", L.bo);
      fn(p + "ln2_g", L.ln2_g);
      fn(p + "ln2_b", L.ln2_b);
      fn(p + "w1", L.w1);
      fn(p + "b1", L.b1);
      fn(p + "w2", L.w2);
      fn(p + "b2", L.b2);
    }
    fn(std::string("lnf_g"), self.lnf_g);
    fn(std::string("lnf_b"), self.lnf_b);
    fn(std::string("w_out"), self.w_out);
    fn(std::string("b_out"), self.b_out);
  }
};

struct Model {
  ModelConfig config;
  Params params;

  // Gaussian init scaled by config.init_scale; gains 1, biases 0.
  static Model init(const ModelConfig& config);
};

/// A supervised position: the distribution at `position` should put mass on
/// `token`. Loss contribution is weight * cross-entropy.
struct Target {
  int position;
  int token;
  double weight;
};

// Logits for every position (n x vocab). `tokens` must fit max_len and use
// valid ids; prefix_len in [1, n].
Matrix forward_logits(const Model& model, std::span<const int> tokens, std::size_t prefix_len);
// Row-wise softmax of forward_logits.
Matrix forward(const Model& model, std::span<const int> tokens, std::size_t prefix_len);
// Log-probabilities at the final position only.
Eigen::VectorXd last_log_probs(const Model& model, std::span<const int> tokens, std::size_t prefix_len);

// Weighted cross-entropy over `targets`; when `grad` is non-null the
// gradient is accumulated into it.
double loss_and_gradient(const Model& model, std::span<const int> tokens, std::size_t prefix_len,
                         std::span<const Target> targets, Params* grad);

}  // namespace bundlecopy::lm
