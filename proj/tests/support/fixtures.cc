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

#include "fixtures.h"

#include <filesystem>

#include "bundlecopy/arbitrator.h"
#include "bundlecopy/common.h"
#include "bundlecopy/lm/checkpoint.h"
#include "bundlecopy/lm/train.h"
#include "bundlecopy/selection.h"

namespace fixtures {

using namespace bundlecopy;

Desk make_desk(std::uint64_t seed) {
  SyntheticConfig config;
  config.seed = seed;
  Desk d{generate_synthetic(config), {}, {}};
  auto products = assign_topics(d.corpus.products, d.corpus.rules);
  d.words = ProductWordModel::train(labeled_from_catalog(products));
  d.catalog = Catalog(annotate_product_words(d.words, std::move(products)));
  return d;
}

const Desk& desk() {
  static const Desk d = make_desk();
  return d;
}

namespace {

Product product(std::string id, std::string title, Attributes attrs, std::string cid, std::string topic,
                std::string word) {
  Product p;
  p.id = std::move(id);
  p.title = std::move(title);
  p.attributes = std::move(attrs);
  p.cid = std::move(cid);
  p.topic = std::move(topic);
  p.product_words = {{std::move(word), 1.0}};
  return p;
}

Combination combo(std::vector<std::string> ids, std::string topic) {
  Combination c;
  c.products = std::move(ids);
  c.topic = std::move(topic);
  return c;
}

Showcase build_showcase() {
  Showcase t;
  std::vector<Product> products = {
      product("sofa", "雅舍真皮沙发三人位", {{"品牌", "雅舍"}, {"材质", "真皮"}}, "1001", "living_room", "沙发"),
      product("table", "雅舍玻璃茶几圆形", {{"品牌", "雅舍"}, {"材质", "玻璃"}}, "1002", "living_room", "茶几"),
      product("filter", "易开得矽藻陶瓷净水器", {{"品牌", "易开得"}, {"材质", "陶瓷"}}, "2002", "kitchen", "净水器"),
      product("fryer", "美厨超大容量空气炸锅", {{"品牌", "美厨"}, {"促销", "再加99元享"}}, "2003", "kitchen",
              "空气炸锅"),
  };
  std::vector<LabeledProduct> labeled = labeled_from_catalog(desk().corpus.products);
  const auto extra = labeled_from_catalog(products);
  labeled.insert(labeled.end(), extra.begin(), extra.end());
  t.words = ProductWordModel::train(labeled);
  t.catalog = Catalog(std::move(products));
  t.lexicon = demo_lexicon();
  t.sofa_table = combo({"sofa", "table"}, "living_room");
  t.filter_fryer = combo({"filter", "fryer"}, "kitchen");
  t.sofa_original = "在繁忙的工作中，有这么一小片恬静的空间，带走城市的喧嚣，留下一地的静谧。";
  t.sofa_generated =
      "城市工作的人们，面临城市的喧嚣，激烈的工作环境，让自己不放松。选择简约的皮艺沙发，搭配简约玻璃茶几组合，"
      "让家具有时尚的魅力。";
  t.filter_original = "再加99元享超大容量空气炸锅。";
  t.filter_generated = "易开得矽藻陶瓷净水器，滤除水中杂质，饮水安全，搭配空气炸锅，健康好物，美好生活！";
  return t;
}

LmData build_lm_data() {
  const Desk& d = desk();
  auto [clean, report] = enhance_dataset(d.corpus.records, d.catalog, d.corpus.lexicon, d.words);
  std::vector<std::string> texts = lm::prefix_texts(d.catalog);
  texts.insert(texts.end(), d.corpus.pretrain_corpus.begin(), d.corpus.pretrain_corpus.end());
  for (const auto& r : clean) texts.push_back(r.content);
  LmData out{lm::Vocab::build(texts), {}, {}};
  for (std::size_t i = 0; i < clean.size(); ++i) {
    auto s = lm::encode_sample(clean[i].combination, d.catalog, clean[i].content, out.vocab);
    (i % 5 == 4 ? out.heldout : out.train).push_back(std::move(s));
  }
  return out;
}

}  // namespace

const Showcase& showcase() {
  static const Showcase t = build_showcase();
  return t;
}

const LmData& lm_data() {
  static const LmData d = build_lm_data();
  return d;
}

std::vector<CopywritingRecord> constructed_records() {
  const Desk& d = desk();
  const std::string tail = "，让每一天都过得轻松惬意。";
  std::vector<CopywritingRecord> out;
  for (std::size_t i = 0; i < 100; ++i) {
    CopywritingRecord r;
    r.combination = d.corpus.combinations[i];
    const Product& a = d.catalog.at(r.combination.products[0]);
    const Product& b = d.catalog.at(r.combination.products[1]);
    const std::string good = a.product_words.front().word + "搭配" + b.product_words.front().word + tail;
    if (i % 5 == 0) {
      r.content = good;
    } else {
      switch (i % 3) {
        case 0: r.content = "再加" + std::to_string(10 + i) + "元享" + good; break;
        case 1: r.content = "生活从此不同" + tail; break;
        default: r.content = a.title + "，" + b.title + "。"; break;
      }
    }
    out.push_back(std::move(r));
  }
  return out;
}

std::vector<CopywritingRecord> random_records(std::uint64_t seed, std::size_t n) {
  const Desk& d = desk();
  Rng rng(seed);
  std::vector<CopywritingRecord> out;
  for (std::size_t i = 0; i < n; ++i) {
    CopywritingRecord r = d.corpus.records[rng.index(d.corpus.records.size())];
    switch (rng.index(6)) {
      case 0: r.content = "这是最好的" + r.content; break;
      case 1: r.content += "绝对值得拥有"; break;
      case 2: r.content = "限时秒杀" + r.content; break;
      case 3: r.content = "再加" + std::to_string(rng.index(500)) + "元" + r.content; break;
      case 4: r.content = "平凡的日子也要认真生活。"; break;
      default: break;
    }
    out.push_back(std::move(r));
  }
  return out;
}

namespace {

std::filesystem::path write_pipeline_artifacts() {
  const Desk& d = desk();
  const LmData& data = lm_data();
  const auto dir = std::filesystem::temp_directory_path() /
                   ("bundlecopy_pipeline_" + std::to_string(fnv1a64(std::filesystem::current_path().string())));
  std::filesystem::create_directories(dir);
  save_catalog(dir / "catalog.jsonl", d.catalog.products());
  d.words.save(dir / "words.json");
  extract_patterns(d.corpus.combinations, d.catalog, d.words, 2).save(dir / "patterns.json");
  write_file(dir / "lexicon.jsonl", d.corpus.lexicon.serialize());
  const auto pairs = build_training_pairs(d.corpus.combinations, d.catalog, ArbitratorVariant::strict, 1.0, 1);
  ArbitratorModel::train(pairs, d.catalog, ArbitratorVariant::strict).save(dir / "strict.json");

  lm::ModelConfig mc;
  mc.vocab_size = static_cast<int>(data.vocab.size());
  mc.layers = 1;
  mc.width = 32;
  mc.heads = 4;
  mc.ff_width = 64;
  mc.max_len = 128;
  auto model = lm::Model::init(mc);
  lm::TrainConfig tc;
  tc.steps = 150;
  lm::finetune(model, data.train, tc);
  lm::save_checkpoint(dir / "model.bclm", model, data.vocab);

  write_file(dir / "pipeline.json", R"({
  "catalog": "catalog.jsonl",
  "patterns": "patterns.json",
  "lexicon": "lexicon.jsonl",
  "word_model": "words.json",
  "strict_arbitrator": "strict.json",
  "checkpoint": "model.bclm",
  "decode": {"beam_size": 2, "max_output_len": 48},
  "seed": 3,
  "retries": 1
})");
  return dir / "pipeline.json";
}

}  // namespace

std::filesystem::path pipeline_config_path() {
  static const std::filesystem::path p = write_pipeline_artifacts();
  return p;
}

}  // namespace fixtures
