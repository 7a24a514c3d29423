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

#include "bundlecopy/lm/model.h"

#include <cmath>
#include <limits>
#include <map>
#include <string>

#include "bundlecopy/common.h"
#include "bundlecopy/lm/mask.h"

namespace bundlecopy::lm {

namespace {

constexpr double kLnEps = 1e-5;
constexpr double kGeluC = 0.7978845608028654;  // sqrt(2 / pi)
constexpr double kGeluA = 0.044715;

struct LnCache {
  Matrix xhat;
  Eigen::VectorXd rstd;
};

Matrix layer_norm(const Matrix& x, const Matrix& g, const Matrix& b, LnCache* cache) {
  const Eigen::VectorXd mean = x.rowwise().mean();
  Matrix centered = x.colwise() - mean;
  const Eigen::VectorXd var = centered.array().square().rowwise().mean();
  const Eigen::VectorXd rstd = (var.array() + kLnEps).rsqrt();
  Matrix xhat = centered.array().colwise() * rstd.array();
  Matrix y = (xhat.array().rowwise() * g.row(0).array()).rowwise() + b.row(0).array();
  if (cache) {
    cache->xhat = std::move(xhat);
    cache->rstd = rstd;
  }
  return y;
}

Matrix layer_norm_backward(const Matrix& dy, const Matrix& g, const LnCache& c, Matrix& dg, Matrix& db) {
  dg += (dy.array() * c.xhat.array()).colwise().sum().matrix();
  db += dy.colwise().sum();
  const Eigen::ArrayXXd dxhat = dy.array().rowwise() * g.row(0).array();
  const Eigen::VectorXd m1 = dxhat.rowwise().mean();
  const Eigen::VectorXd m2 = (dxhat * c.xhat.array()).rowwise().mean();
  Eigen::ArrayXXd dx = dxhat;
  dx.colwise() -= m1.array();
  dx -= c.xhat.array().colwise() * m2.array();
  dx.colwise() *= c.rstd.array();
  return dx.matrix();
}

double gelu(double x) { return 0.5 * x * (1.0 + std::tanh(kGeluC * (x + kGeluA * x * x * x))); }

double gelu_grad(double x) {
  const double t = std::tanh(kGeluC * (x + kGeluA * x * x * x));
  return 0.5 * (1.0 + t) + 0.5 * x * (1.0 - t * t) * kGeluC * (1.0 + 3.0 * kGeluA * x * x);
}

struct LayerCache {
  LnCache ln1, ln2;
  Matrix a, q, k, v, o, b, h, act;
  std::vector<Matrix> probs;
};

struct Cache {
  std::vector<LayerCache> layers;
  LnCache lnf;
};

void check_inputs(const Model& m, std::span<const int> tokens, std::size_t prefix_len) {
  const std::size_t n = tokens.size();
  if (n == 0) throw Error("forward: empty token sequence");
  if (n > static_cast<std::size_t>(m.config.max_len)) {
    throw Error("forward: sequence length " + std::to_string(n) + " exceeds max_len " +
                std::to_string(m.config.max_len));
  }
  if (prefix_len < 1 || prefix_len > n) throw Error("forward: prefix_len must lie in [1, n]");
  for (int t : tokens) {
    if (t < 0 || t >= m.config.vocab_size) throw Error("forward: token id " + std::to_string(t) + " out of vocabulary");
  }
}

// Final hidden states after the closing layer norm (n x width).
Matrix run(const Model& m, std::span<const int> tokens, std::size_t prefix_len, Cache* cache) {
  check_inputs(m, tokens, prefix_len);
  const auto& P = m.params;
  const auto n = static_cast<Eigen::Index>(tokens.size());
  const int d = m.config.width;
  const int dh = d / m.config.heads;
  const double scale = 1.0 / std::sqrt(static_cast<double>(dh));

  Matrix x(n, d);
  for (Eigen::Index i = 0; i < n; ++i) {
    x.row(i) = P.tok_emb.row(tokens[static_cast<std::size_t>(i)]) + P.pos_emb.row(i) +
               P.seg_emb.row(static_cast<std::size_t>(i) < prefix_len ? 0 : 1);
  }
  if (cache) cache->layers.resize(P.layers.size());

  for (std::size_t l = 0; l < P.layers.size(); ++l) {
    const LayerParams& L = P.layers[l];
    LayerCache local;
    LayerCache& c = cache ? cache->layers[l] : local;

    c.a = layer_norm(x, L.ln1_g, L.ln1_b, &c.ln1);
    c.q = (c.a * L.wq).rowwise() + L.bq.row(0);
    c.k = (c.a * L.wk).rowwise() + L.bk.row(0);
    c.v = (c.a * L.wv).rowwise() + L.bv.row(0);
    c.o.resize(n, d);
    c.probs.resize(static_cast<std::size_t>(m.config.heads));
    for (int h = 0; h < m.config.heads; ++h) {
      Matrix s = c.q.middleCols(h * dh, dh) * c.k.middleCols(h * dh, dh).transpose() * scale;
      for (Eigen::Index i = 0; i < n; ++i) {
        double row_max = -std::numeric_limits<double>::infinity();
        for (Eigen::Index j = 0; j < n; ++j) {
          if (!mask_allows(prefix_len, static_cast<std::size_t>(i), static_cast<std::size_t>(j))) {
            s(i, j) = 0.0;
            continue;
          }
          row_max = std::max(row_max, s(i, j));
        }
        double sum = 0.0;
        for (Eigen::Index j = 0; j < n; ++j) {
          if (!mask_allows(prefix_len, static_cast<std::size_t>(i), static_cast<std::size_t>(j))) continue;
          s(i, j) = std::exp(s(i, j) - row_max);
          sum += s(i, j);
        }
        s.row(i) /= sum;
      }
      c.o.middleCols(h * dh, dh).noalias() = s * c.v.middleCols(h * dh, dh);
      c.probs[static_cast<std::size_t>(h)] = std::move(s);
    }
    x += (c.o * L.wo).rowwise() + L.bo.row(0);

    c.b = layer_norm(x, L.ln2_g, L.ln2_b, &c.ln2);
    c.h = (c.b * L.w1).rowwise() + L.b1.row(0);
    c.act = c.h.unaryExpr([](double z) { return gelu(z); });
    x += (c.act * L.w2).rowwise() + L.b2.row(0);
  }
  return layer_norm(x, P.lnf_g, P.lnf_b, cache ? &cache->lnf : nullptr);
}

Eigen::VectorXd log_softmax(const Eigen::VectorXd& logits) {
  const double mx = logits.maxCoeff();
  const double lse = mx + std::log((logits.array() - mx).exp().sum());
  return logits.array() - lse;
}

}  // namespace

void ModelConfig::validate() const {
  if (vocab_size <= 0) throw Error("model config: vocab_size must be positive");
  if (layers < 0) throw Error("model config: layers must be non-negative");
  if (width <= 0 || heads <= 0 || width % heads != 0) {
    throw Error("model config: width must be a positive multiple of heads");
  }
  if (ff_width <= 0 || max_len <= 0) throw Error("model config: ff_width and max_len must be positive");
}

Params Params::zeros_like() const {
  Params z = *this;
  z.visit([](const std::string&, Matrix& t) { t.setZero(); });
  return z;
}

std::size_t Params::parameter_count() const {
  std::size_t n = 0;
  visit([&](const std::string&, const Matrix& t) { n += static_cast<std::size_t>(t.size()); });
  return n;
}

bool Params::all_finite() const {
  bool ok = true;
  visit([&](const std::string&, const Matrix& t) { ok = ok && t.allFinite(); });
  return ok;
}

Model Model::init(const ModelConfig& config) {
  config.validate();
  const int d = config.width, f = config.ff_width, v = config.vocab_size;
  Model m;
  m.config = config;
  Params& p = m.params;
  p.tok_emb = Matrix::Zero(v, d);
  p.pos_emb = Matrix::Zero(config.max_len, d);
  p.seg_emb = Matrix::Zero(2, d);
  p.layers.resize(static_cast<std::size_t>(config.layers));
  for (auto& L : p.layers) {
    L.ln1_g = Matrix::Ones(1, d);
    L.ln1_b = Matrix::Zero(1, d);
    L.wq = Matrix::Zero(d, d);
    L.bq = Matrix::Zero(1, d);
    L.wk = Matrix::Zero(d, d);
    L.bk = Matrix::Zero(1, d);
    L.wv = Matrix::Zero(d, d);
    L.bv = Matrix::Zero(1, d);
    L.wo = Matrix::Zero(d, d);
    L.bo = Matrix::Zero(1, d);
    L.ln2_g = Matrix::Ones(1, d);
    L.ln2_b = Matrix::Zero(1, d);
    L.w1 = Matrix::Zero(d, f);
    L.b1 = Matrix::Zero(1, f);
    L.w2 = Matrix::Zero(f, d);
    L.b2 = Matrix::Zero(1, d);
  }
  p.lnf_g = Matrix::Ones(1, d);
  p.lnf_b = Matrix::Zero(1, d);
  p.w_out = Matrix::Zero(d, v);
  p.b_out = Matrix::Zero(1, v);

  Rng rng(config.seed);
  p.visit([&](const std::string&, Matrix& t) {
    if (t.rows() == 1) return;  // gains and biases keep their constant init
    for (Eigen::Index i = 0; i < t.size(); ++i) t.data()[i] = config.init_scale * rng.normal();
  });
  return m;
}

Matrix forward_logits(const Model& model, std::span<const int> tokens, std::size_t prefix_len) {
  const Matrix f = run(model, tokens, prefix_len, nullptr);
  return (f * model.params.w_out).rowwise() + model.params.b_out.row(0);
}

Matrix forward(const Model& model, std::span<const int> tokens, std::size_t prefix_len) {
  Matrix logits = forward_logits(model, tokens, prefix_len);
  for (Eigen::Index i = 0; i < logits.rows(); ++i) {
    const double mx = logits.row(i).maxCoeff();
    logits.row(i) = (logits.row(i).array() - mx).exp();
    logits.row(i) /= logits.row(i).sum();
  }
  return logits;
}

Eigen::VectorXd last_log_probs(const Model& model, std::span<const int> tokens, std::size_t prefix_len) {
  const Matrix f = run(model, tokens, prefix_len, nullptr);
  const Eigen::VectorXd logits =
      (f.row(f.rows() - 1) * model.params.w_out + model.params.b_out.row(0)).transpose();
  return log_softmax(logits);
}

double loss_and_gradient(const Model& model, std::span<const int> tokens, std::size_t prefix_len,
                         std::span<const Target> targets, Params* grad) {
  Cache cache;
  const Matrix f = run(model, tokens, prefix_len, grad ? &cache : nullptr);
  const auto& P = model.params;
  const auto n = static_cast<Eigen::Index>(tokens.size());

  // Group targets by position so each supervised row is projected once.
  std::map<int, std::vector<const Target*>> by_pos;
  for (const auto& t : targets) {
    if (t.position < 0 || t.position >= n) throw Error("loss: target position out of range");
    if (t.token < 0 || t.token >= model.config.vocab_size) throw Error("loss: target token out of vocabulary");
    by_pos[t.position].push_back(&t);
  }

  double loss = 0.0;
  Matrix df = Matrix::Zero(n, model.config.width);
  for (const auto& [pos, ts] : by_pos) {
    const Eigen::VectorXd logits = (f.row(pos) * P.w_out + P.b_out.row(0)).transpose();
    const Eigen::VectorXd logp = log_softmax(logits);
    double wsum = 0.0;
    Eigen::VectorXd dlogits = Eigen::VectorXd::Zero(logits.size());
    for (const Target* t : ts) {
      loss -= t->weight * logp(t->token);
      wsum += t->weight;
      dlogits(t->token) -= t->weight;
    }
    if (!grad) continue;
    dlogits += wsum * logp.array().exp().matrix();
    grad->w_out += f.row(pos).transpose() * dlogits.transpose();
    grad->b_out += dlogits.transpose();
    df.row(pos) = (P.w_out * dlogits).transpose();
  }
  if (!grad) return loss;

  const int d = model.config.width;
  const int dh = d / model.config.heads;
  const double scale = 1.0 / std::sqrt(static_cast<double>(dh));

  Matrix dx = layer_norm_backward(df, P.lnf_g, cache.lnf, grad->lnf_g, grad->lnf_b);
  for (std::size_t li = P.layers.size(); li-- > 0;) {
    const LayerParams& L = P.layers[li];
    LayerParams& G = grad->layers[li];
    const LayerCache& c = cache.layers[li];

    // Feed-forward block.
    G.w2.noalias() += c.act.transpose() * dx;
    G.b2 += dx.colwise().sum();
    Matrix dh_act = dx * L.w2.transpose();
    dh_act.array() *= c.h.unaryExpr([](double z) { return gelu_grad(z); }).array();
    G.w1.noalias() += c.b.transpose() * dh_act;
    G.b1 += dh_act.colwise().sum();
    const Matrix db = dh_act * L.w1.transpose();
    dx += layer_norm_backward(db, L.ln2_g, c.ln2, G.ln2_g, G.ln2_b);

    // Attention block.
    G.wo.noalias() += c.o.transpose() * dx;
    G.bo += dx.colwise().sum();
    const Matrix d_o = dx * L.wo.transpose();
    Matrix dq = Matrix::Zero(n, d), dk = Matrix::Zero(n, d), dv = Matrix::Zero(n, d);
    for (int h = 0; h < model.config.heads; ++h) {
      const Matrix& probs = c.probs[static_cast<std::size_t>(h)];
      const auto doh = d_o.middleCols(h * dh, dh);
      const Matrix dprobs = doh * c.v.middleCols(h * dh, dh).transpose();
      dv.middleCols(h * dh, dh).noalias() += probs.transpose() * doh;
      const Eigen::VectorXd rowdot = (dprobs.array() * probs.array()).rowwise().sum();
      Matrix ds = (probs.array() * (dprobs.array().colwise() - rowdot.array())).matrix() * scale;
      dq.middleCols(h * dh, dh).noalias() += ds * c.k.middleCols(h * dh, dh);
      dk.middleCols(h * dh, dh).noalias() += ds.transpose() * c.q.middleCols(h * dh, dh);
    }
    G.wq.noalias() += c.a.transpose() * dq;
    G.bq += dq.colwise().sum();
    G.wk.noalias() += c.a.transpose() * dk;
    G.bk += dk.colwise().sum();
    G.wv.noalias() += c.a.transpose() * dv;
    G.bv += dv.colwise().sum();
    const Matrix da = dq * L.wq.transpose() + dk * L.wk.transpose() + dv * L.wv.transpose();
    dx += layer_norm_backward(da, L.ln1_g, c.ln1, G.ln1_g, G.ln1_b);
  }

  for (Eigen::Index i = 0; i < n; ++i) {
    grad->tok_emb.row(tokens[static_cast<std::size_t>(i)]) += dx.row(i);
    grad->pos_emb.row(i) += dx.row(i);
    grad->seg_emb.row(static_cast<std::size_t>(i) < prefix_len ? 0 : 1) += dx.row(i);
  }
  return loss;
}

}  // namespace bundlecopy::lm
