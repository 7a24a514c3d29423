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

#include "oracles.h"

#include <algorithm>
#include <cmath>
#include <limits>

#include "bundlecopy/common.h"
#include "bundlecopy/lm/vocab.h"

namespace oracle {

namespace {

std::vector<Tokens> grams(const Tokens& t, int n) {
  std::vector<Tokens> out;
  for (int i = 0; i + n <= static_cast<int>(t.size()); ++i) out.emplace_back(t.begin() + i, t.begin() + i + n);
  return out;
}

std::size_t occurrences(const std::vector<Tokens>& list, const Tokens& g) {
  return static_cast<std::size_t>(std::count(list.begin(), list.end(), g));
}

// Sum over distinct grams of a of min(count in a, count in b).
std::size_t clipped(const std::vector<Tokens>& a, const std::vector<Tokens>& b) {
  std::size_t total = 0;
  std::vector<Tokens> seen;
  for (const auto& g : a) {
    if (std::find(seen.begin(), seen.end(), g) != seen.end()) continue;
    seen.push_back(g);
    total += std::min(occurrences(a, g), occurrences(b, g));
  }
  return total;
}

double f_score(double overlap, double cand, double ref) {
  if (overlap == 0 || cand == 0 || ref == 0) return 0.0;
  const double p = overlap / cand;
  const double r = overlap / ref;
  return 2 * p * r / (p + r);
}

}  // namespace

double bleu(std::span<const EvalPair> pairs, int n, bool smooth) {
  std::vector<double> hit(static_cast<std::size_t>(n) + 1, 0), all(static_cast<std::size_t>(n) + 1, 0);
  double c_len = 0, r_len = 0;
  for (const auto& p : pairs) {
    const double c = static_cast<double>(p.candidate.size());
    c_len += c;
    double best = std::numeric_limits<double>::infinity();
    double best_gap = std::numeric_limits<double>::infinity();
    for (const auto& r : p.references) {
      const double rl = static_cast<double>(r.size());
      const double gap = std::fabs(rl - c);
      if (gap < best_gap || (gap == best_gap && rl < best)) {
        best_gap = gap;
        best = rl;
      }
    }
    r_len += best;
    for (int k = 1; k <= n; ++k) {
      const auto cg = grams(p.candidate, k);
      all[static_cast<std::size_t>(k)] += static_cast<double>(cg.size());
      std::vector<Tokens> seen;
      for (const auto& g : cg) {
        if (std::find(seen.begin(), seen.end(), g) != seen.end()) continue;
        seen.push_back(g);
        std::size_t ref_max = 0;
        for (const auto& r : p.references) ref_max = std::max(ref_max, occurrences(grams(r, k), g));
        hit[static_cast<std::size_t>(k)] += static_cast<double>(std::min(occurrences(cg, g), ref_max));
      }
    }
  }
  if (c_len == 0) return 0.0;
  double product = 1.0;
  for (int k = 1; k <= n; ++k) {
    double h = hit[static_cast<std::size_t>(k)], a = all[static_cast<std::size_t>(k)];
    if (smooth && k >= 2) {
      h += 1;
      a += 1;
    }
    if (a == 0 || h == 0) return 0.0;
    product *= h / a;
  }
  const double bp = c_len >= r_len ? 1.0 : std::exp(1.0 - r_len / c_len);
  return 100.0 * bp * std::pow(product, 1.0 / n);
}

double rouge_n(std::span<const EvalPair> pairs, int n) {
  if (pairs.empty()) return 0.0;
  double sum = 0;
  for (const auto& p : pairs) {
    double best = 0;
    const auto cg = grams(p.candidate, n);
    for (const auto& r : p.references) {
      const auto rg = grams(r, n);
      best = std::max(best, f_score(static_cast<double>(clipped(cg, rg)), static_cast<double>(cg.size()),
                                    static_cast<double>(rg.size())));
    }
    sum += best;
  }
  return 100.0 * sum / static_cast<double>(pairs.size());
}

std::size_t lcs_by_subsets(const Tokens& a, const Tokens& b) {
  std::size_t best = 0;
  const std::size_t n = a.size();
  for (std::uint32_t mask = 0; mask < (1u << n); ++mask) {
    const auto size = static_cast<std::size_t>(__builtin_popcount(mask));
    if (size <= best) continue;
    std::size_t j = 0;
    bool ok = true;
    for (std::size_t i = 0; i < n && ok; ++i) {
      if (!(mask >> i & 1u)) continue;
      while (j < b.size() && b[j] != a[i]) ++j;
      if (j == b.size()) ok = false;
      else ++j;
    }
    if (ok) best = size;
  }
  return best;
}

double rouge_l(std::span<const EvalPair> pairs) {
  if (pairs.empty()) return 0.0;
  double sum = 0;
  for (const auto& p : pairs) {
    double best = 0;
    for (const auto& r : p.references) {
      best = std::max(best, f_score(static_cast<double>(lcs_by_subsets(p.candidate, r)),
                                    static_cast<double>(p.candidate.size()), static_cast<double>(r.size())));
    }
    sum += best;
  }
  return 100.0 * sum / static_cast<double>(pairs.size());
}

std::pair<std::size_t, std::size_t> best_alignment(const Tokens& cand, const Tokens& ref) {
  // State after deciding candidate positions [0, i): used reference mask and
  // the reference index matched by position i-1 (ref.size() when unmatched).
  // Value: best (matches, -chunks) reachable from here to the end.
  const std::size_t n = cand.size(), m = ref.size();
  const std::size_t masks = std::size_t{1} << m;
  using Value = std::pair<long, long>;
  const Value unset{-1, 0};
  std::vector<Value> memo((n + 1) * masks * (m + 1), unset);
  auto idx = [&](std::size_t i, std::size_t mask, std::size_t prev) { return (i * masks + mask) * (m + 1) + prev; };
  auto solve = [&](auto&& self, std::size_t i, std::size_t mask, std::size_t prev) -> Value {
    if (i == n) return {0, 0};
    Value& slot = memo[idx(i, mask, prev)];
    if (slot != unset) return slot;
    Value best = self(self, i + 1, mask, m);  // leave position i unmatched
    for (std::size_t j = 0; j < m; ++j) {
      if ((mask >> j & 1u) || ref[j] != cand[i]) continue;
      Value v = self(self, i + 1, mask | (std::size_t{1} << j), j);
      v.first += 1;
      const bool continues = prev != m && prev + 1 == j;
      if (!continues) v.second -= 1;
      best = std::max(best, v);
    }
    slot = best;
    return best;
  };
  const Value v = solve(solve, 0, 0, m);
  return {static_cast<std::size_t>(v.first), static_cast<std::size_t>(-v.second)};
}

double meteor(std::span<const EvalPair> pairs) {
  if (pairs.empty()) return 0.0;
  double sum = 0;
  for (const auto& p : pairs) {
    double best = 0;
    for (const auto& r : p.references) {
      const auto [matches, chunks] = best_alignment(p.candidate, r);
      if (matches == 0) continue;
      const double m = static_cast<double>(matches);
      const double precision = m / static_cast<double>(p.candidate.size());
      const double recall = m / static_cast<double>(r.size());
      const double fmean = precision * recall / (0.9 * precision + 0.1 * recall);
      const double penalty = 0.5 * std::pow(static_cast<double>(chunks) / m, 3.0);
      best = std::max(best, fmean * (1.0 - penalty));
    }
    sum += best;
  }
  return 100.0 * sum / static_cast<double>(pairs.size());
}

std::vector<std::vector<double>> forward(const bundlecopy::lm::Model& model, const std::vector<int>& tokens,
                                         std::size_t prefix_len) {
  using Vec = std::vector<double>;
  using Mat = std::vector<Vec>;
  const auto& P = model.params;
  const int d = model.config.width, heads = model.config.heads, dh = d / heads;
  const int vocab = model.config.vocab_size;
  const std::size_t n = tokens.size();

  auto layer_norm = [&](const Vec& x, const bundlecopy::lm::Matrix& g, const bundlecopy::lm::Matrix& b) {
    double mean = 0;
    for (double v : x) mean += v;
    mean /= d;
    double var = 0;
    for (double v : x) var += (v - mean) * (v - mean);
    var /= d;
    Vec y(static_cast<std::size_t>(d));
    for (int k = 0; k < d; ++k) y[static_cast<std::size_t>(k)] = (x[static_cast<std::size_t>(k)] - mean) / std::sqrt(var + 1e-5) * g(0, k) + b(0, k);
    return y;
  };
  auto affine = [](const Vec& x, const bundlecopy::lm::Matrix& w, const bundlecopy::lm::Matrix& b) {
    Vec y(static_cast<std::size_t>(w.cols()));
    for (int c = 0; c < w.cols(); ++c) {
      double s = b(0, c);
      for (int r = 0; r < w.rows(); ++r) s += x[static_cast<std::size_t>(r)] * w(r, c);
      y[static_cast<std::size_t>(c)] = s;
    }
    return y;
  };

  Mat x(n, Vec(static_cast<std::size_t>(d)));
  for (std::size_t i = 0; i < n; ++i) {
    for (int k = 0; k < d; ++k) {
      x[i][static_cast<std::size_t>(k)] = P.tok_emb(tokens[i], k) + P.pos_emb(static_cast<int>(i), k) +
                                          P.seg_emb(i < prefix_len ? 0 : 1, k);
    }
  }
  for (const auto& L : P.layers) {
    Mat q(n), kk(n), v(n);
    for (std::size_t i = 0; i < n; ++i) {
      const Vec a = layer_norm(x[i], L.ln1_g, L.ln1_b);
      q[i] = affine(a, L.wq, L.bq);
      kk[i] = affine(a, L.wk, L.bk);
      v[i] = affine(a, L.wv, L.bv);
    }
    Mat attn(n, Vec(static_cast<std::size_t>(d), 0.0));
    for (int h = 0; h < heads; ++h) {
      for (std::size_t i = 0; i < n; ++i) {
        std::vector<double> w(n, 0.0);
        double total = 0;
        for (std::size_t j = 0; j < n; ++j) {
          const bool visible = j < prefix_len || j <= i;
          if (!visible) continue;
          double s = 0;
          for (int c = 0; c < dh; ++c) s += q[i][static_cast<std::size_t>(h * dh + c)] * kk[j][static_cast<std::size_t>(h * dh + c)];
          w[j] = std::exp(s / std::sqrt(static_cast<double>(dh)));
          total += w[j];
        }
        for (std::size_t j = 0; j < n; ++j) {
          for (int c = 0; c < dh; ++c) attn[i][static_cast<std::size_t>(h * dh + c)] += w[j] / total * v[j][static_cast<std::size_t>(h * dh + c)];
        }
      }
    }
    for (std::size_t i = 0; i < n; ++i) {
      const Vec o = affine(attn[i], L.wo, L.bo);
      for (int k = 0; k < d; ++k) x[i][static_cast<std::size_t>(k)] += o[static_cast<std::size_t>(k)];
      Vec hdn = affine(layer_norm(x[i], L.ln2_g, L.ln2_b), L.w1, L.b1);
      for (double& z : hdn) z = 0.5 * z * (1.0 + std::tanh(std::sqrt(2.0 / M_PI) * (z + 0.044715 * z * z * z)));
      const Vec f = affine(hdn, L.w2, L.b2);
      for (int k = 0; k < d; ++k) x[i][static_cast<std::size_t>(k)] += f[static_cast<std::size_t>(k)];
    }
  }
  Mat out(n);
  for (std::size_t i = 0; i < n; ++i) {
    const Vec logits = affine(layer_norm(x[i], P.lnf_g, P.lnf_b), P.w_out, P.b_out);
    double mx = -std::numeric_limits<double>::infinity();
    for (double z : logits) mx = std::max(mx, z);
    double total = 0;
    out[i].resize(static_cast<std::size_t>(vocab));
    for (int t = 0; t < vocab; ++t) total += out[i][static_cast<std::size_t>(t)] = std::exp(logits[static_cast<std::size_t>(t)] - mx);
    for (double& p : out[i]) p /= total;
  }
  return out;
}

bundlecopy::lm::Hypothesis exhaustive_decode(const bundlecopy::lm::Model& model, const std::vector<int>& prefix,
                                             std::size_t horizon, double alpha) {
  using bundlecopy::lm::Hypothesis;
  std::vector<int> outputs;
  for (int id = 0; id < model.config.vocab_size; ++id) {
    if (id == bundlecopy::lm::kEos || !bundlecopy::lm::is_special(id)) outputs.push_back(id);
  }
  Hypothesis best;
  bool have = false;
  auto consider = [&](const std::vector<int>& toks, double lp) {
    const double score = lp / std::pow(static_cast<double>(toks.size()), alpha);
    if (!have || score > best.score || (score == best.score && toks.size() < best.tokens.size())) {
      best = {toks, lp, score};
      have = true;
    }
  };
  auto expand = [&](auto&& self, std::vector<int>& toks, double lp) -> void {
    std::vector<int> seq = prefix;
    seq.insert(seq.end(), toks.begin(), toks.end());
    const auto dist = forward(model, seq, prefix.size());
    const auto& last = dist.back();
    // Renormalisation is not applied: the decoder scores with the full softmax.
    for (int id : outputs) {
      toks.push_back(id);
      const double next = lp + std::log(last[static_cast<std::size_t>(id)]);
      if (id == bundlecopy::lm::kEos || toks.size() == horizon) consider(toks, next);
      else self(self, toks, next);
      toks.pop_back();
    }
  };
  std::vector<int> toks;
  expand(expand, toks, 0.0);
  return best;
}

std::vector<TensorCheck> gradient_check(bundlecopy::lm::Model model, const std::vector<int>& tokens,
                                        std::size_t prefix_len, const std::vector<bundlecopy::lm::Target>& targets,
                                        double h) {
  using bundlecopy::lm::Matrix;
  bundlecopy::lm::Params grad = model.params.zeros_like();
  bundlecopy::lm::loss_and_gradient(model, tokens, prefix_len, targets, &grad);
  std::vector<Matrix*> weights;
  std::vector<const Matrix*> grads;
  std::vector<std::string> names;
  model.params.visit([&](const std::string& n, Matrix& t) {
    names.push_back(n);
    weights.push_back(&t);
  });
  grad.visit([&](const std::string&, const Matrix& t) { grads.push_back(&t); });
  std::vector<TensorCheck> out;
  for (std::size_t k = 0; k < weights.size(); ++k) {
    Matrix numeric(weights[k]->rows(), weights[k]->cols());
    for (Eigen::Index i = 0; i < weights[k]->size(); ++i) {
      double& w = weights[k]->data()[i];
      const double saved = w;
      w = saved + h;
      const double up = bundlecopy::lm::loss_and_gradient(model, tokens, prefix_len, targets, nullptr);
      w = saved - h;
      const double down = bundlecopy::lm::loss_and_gradient(model, tokens, prefix_len, targets, nullptr);
      w = saved;
      numeric.data()[i] = (up - down) / (2 * h);
    }
    TensorCheck c{names[k], grads[k]->norm(), numeric.norm(), 0};
    const double diff = (*grads[k] - numeric).norm();
    const double scale = c.analytic_norm + c.numeric_norm;
    c.error = scale < 1e-7 ? diff : diff / scale;
    out.push_back(std::move(c));
  }
  return out;
}

std::vector<EvalPair> random_pairs(std::uint64_t seed, std::size_t count, std::size_t max_len, std::size_t alphabet,
                                   std::size_t max_refs) {
  bundlecopy::Rng rng(seed);
  auto sentence = [&](std::size_t min_len) {
    Tokens t(min_len + rng.index(max_len - min_len + 1));
    for (auto& s : t) s = std::string(1, static_cast<char>('a' + rng.index(alphabet)));
    return t;
  };
  std::vector<EvalPair> out;
  for (std::size_t i = 0; i < count; ++i) {
    EvalPair p;
    p.candidate = sentence(0);
    const std::size_t refs = 1 + rng.index(max_refs);
    for (std::size_t r = 0; r < refs; ++r) p.references.push_back(sentence(1));
    out.push_back(std::move(p));
  }
  return out;
}

}  // namespace oracle
