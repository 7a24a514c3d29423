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

#include <benchmark/benchmark.h>

#include <vector>

#include "bundlecopy/arbitrator.h"
#include "bundlecopy/common.h"
#include "bundlecopy/enhancement.h"
#include "bundlecopy/lm/decode.h"
#include "bundlecopy/lm/model.h"
#include "bundlecopy/lm/vocab.h"
#include "bundlecopy/metrics.h"
#include "bundlecopy/selection.h"
#include "bundlecopy/synthetic.h"

namespace bc = bundlecopy;
namespace lm = bundlecopy::lm;

namespace {

lm::Model model(int vocab) {
  lm::ModelConfig c;
  c.vocab_size = vocab;
  c.max_len = 128;
  return lm::Model::init(c);
}

std::vector<int> tokens(std::size_t n, int vocab, std::uint64_t seed) {
  bc::Rng rng(seed);
  std::vector<int> t = {lm::kBos};
  while (t.size() < n) t.push_back(lm::kNumSpecial + static_cast<int>(rng.index(vocab - lm::kNumSpecial)));
  return t;
}

void BM_Forward(benchmark::State& state) {
  const auto m = model(800);
  const auto n = static_cast<std::size_t>(state.range(0));
  const auto t = tokens(n, 800, 1);
  for (auto _ : state) benchmark::DoNotOptimize(lm::forward_logits(m, t, n / 2));
  state.SetItemsProcessed(state.iterations() * static_cast<long>(n));
}
BENCHMARK(BM_Forward)->Arg(32)->Arg(64)->Arg(128)->Unit(benchmark::kMillisecond);

void BM_LossAndGradient(benchmark::State& state) {
  const auto m = model(800);
  const auto n = static_cast<std::size_t>(state.range(0));
  const auto t = tokens(n, 800, 2);
  std::vector<lm::Target> targets;
  for (std::size_t i = n / 2; i + 1 < n; ++i) targets.push_back({static_cast<int>(i), t[i + 1], 1.0});
  auto grad = m.params.zeros_like();
  for (auto _ : state) benchmark::DoNotOptimize(lm::loss_and_gradient(m, t, n / 2, targets, &grad));
}
BENCHMARK(BM_LossAndGradient)->Arg(64)->Arg(128)->Unit(benchmark::kMillisecond);

void BM_BeamSearch(benchmark::State& state) {
  const auto m = model(400);
  const auto prefix = tokens(40, 400, 3);
  lm::DecodeConfig dc;
  dc.beam_size = static_cast<std::size_t>(state.range(0));
  dc.max_output_len = 24;
  for (auto _ : state) benchmark::DoNotOptimize(lm::generate_beam(m, prefix, dc));
}
BENCHMARK(BM_BeamSearch)->Arg(1)->Arg(3)->Arg(5)->Unit(benchmark::kMillisecond);

std::vector<bc::metrics::EvalPair> eval_pairs(std::size_t count, std::size_t len) {
  bc::Rng rng(4);
  auto sentence = [&] {
    bc::metrics::Tokens s;
    for (std::size_t i = 0; i < len; ++i) s.push_back(std::string(1, static_cast<char>('a' + rng.index(12))));
    return s;
  };
  std::vector<bc::metrics::EvalPair> out;
  for (std::size_t i = 0; i < count; ++i) out.push_back({sentence(), {sentence()}});
  return out;
}

void BM_EvaluatePairs(benchmark::State& state) {
  const auto pairs = eval_pairs(200, static_cast<std::size_t>(state.range(0)));
  for (auto _ : state) benchmark::DoNotOptimize(bc::metrics::evaluate_pairs(pairs));
}
BENCHMARK(BM_EvaluatePairs)->Arg(12)->Arg(40)->Unit(benchmark::kMillisecond);

struct Shop {
  bc::SyntheticCorpus corpus = bc::generate_synthetic();
  bc::Catalog catalog{bc::assign_topics(corpus.products, corpus.rules)};
  bc::SlotIndex slots = bc::SlotIndex::from_annotations(catalog);
  bc::PatternTable table = bc::extract_patterns(corpus.combinations, catalog, slots, 2);
};

const Shop& shop() {
  static const Shop s;
  return s;
}

void BM_SelectPattern(benchmark::State& state) {
  const auto& s = shop();
  const auto topic = s.catalog.topics().front();
  std::uint64_t seed = 0;
  for (auto _ : state) benchmark::DoNotOptimize(bc::select_pattern(s.catalog, s.slots, s.table, topic, 100, ++seed));
}
BENCHMARK(BM_SelectPattern)->Unit(benchmark::kMillisecond);

void BM_ArbitratorScore(benchmark::State& state) {
  const auto& s = shop();
  const auto pairs =
      bc::build_training_pairs(s.corpus.combinations, s.catalog, bc::ArbitratorVariant::strict, 1.0, 1);
  const auto arb = bc::ArbitratorModel::train(pairs, s.catalog, bc::ArbitratorVariant::strict);
  std::size_t i = 0;
  for (auto _ : state) {
    benchmark::DoNotOptimize(arb.score(s.corpus.combinations[i], s.catalog));
    i = (i + 1) % s.corpus.combinations.size();
  }
}
BENCHMARK(BM_ArbitratorScore);

void BM_FilterForbidden(benchmark::State& state) {
  const auto& s = shop();
  std::size_t i = 0;
  for (auto _ : state) {
    benchmark::DoNotOptimize(bc::filter_forbidden(s.corpus.records[i].content, s.corpus.lexicon));
    i = (i + 1) % s.corpus.records.size();
  }
}
BENCHMARK(BM_FilterForbidden);

}  // namespace

BENCHMARK_MAIN();
