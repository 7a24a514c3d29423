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

#include <cstdio>
#include <fstream>
#include <iostream>
#include <memory>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "bundlecopy/arbitrator.h"
#include "bundlecopy/catalog.h"
#include "bundlecopy/common.h"
#include "bundlecopy/enhancement.h"
#include "bundlecopy/lm/checkpoint.h"
#include "bundlecopy/lm/decode.h"
#include "bundlecopy/lm/sample.h"
#include "bundlecopy/lm/train.h"
#include "bundlecopy/metrics.h"
#include "bundlecopy/pipeline.h"
#include "bundlecopy/product_words.h"
#include "bundlecopy/selection.h"
#include "bundlecopy/service.h"
#include "bundlecopy/synthetic.h"
#include "bundlecopy/text.h"

namespace bc = bundlecopy;
namespace fs = std::filesystem;

namespace {

// Loads a catalog; with a word model the product words are re-predicted so
// every stage keys on the same annotation.
bc::Catalog open_catalog(const std::string& path, const std::string& words_path) {
  auto products = bc::load_catalog(path);
  if (!words_path.empty()) {
    products = bc::annotate_product_words(bc::ProductWordModel::load(words_path), std::move(products));
  }
  return bc::Catalog(std::move(products));
}

void emit(const std::string& out, const std::string& text) {
  if (out.empty() || out == "-") {
    std::cout << text;
  } else {
    bc::write_file(out, text);
  }
}

std::string combinations_text(const std::vector<bc::Combination>& combos) {
  std::string text;
  for (const auto& c : combos) text += bc::serialize_combination(c) + "\n";
  return text;
}

struct ModelOptions {
  int width = 64, layers = 2, heads = 4, ff = 256, max_len = 256;
};

struct TrainOptions {
  std::size_t steps = 200, batch = 8;
  double lr = 0.5, corruption = 0.15, clip = 1.0, w_rec = 1.0, w_ar = 1.0;
  std::string optimizer = "sgd";
  std::uint64_t seed = 1;

  bc::lm::TrainConfig config() const {
    bc::lm::TrainConfig c;
    c.steps = steps;
    c.batch_size = batch;
    c.learning_rate = lr;
    c.corruption_ratio = corruption;
    c.clip_norm = clip;
    c.reconstruction_weight = w_rec;
    c.autoregressive_weight = w_ar;
    c.optimizer = bc::lm::parse_optimizer(optimizer);
    c.seed = seed;
    return c;
  }
};

void add_model_options(CLI::App* sub, ModelOptions& m) {
  sub->add_option("--width", m.width, "Model width")->capture_default_str();
  sub->add_option("--layers", m.layers, "Transformer layers")->capture_default_str();
  sub->add_option("--heads", m.heads, "Attention heads")->capture_default_str();
  sub->add_option("--ff", m.ff, "Feed-forward width")->capture_default_str();
  sub->add_option("--max-len", m.max_len, "Maximum sequence length")->capture_default_str();
}

void add_train_options(CLI::App* sub, TrainOptions& t) {
  sub->add_option("--steps", t.steps, "Optimisation steps")->capture_default_str();
  sub->add_option("--batch", t.batch, "Batch size")->capture_default_str();
  sub->add_option("--lr", t.lr, "Learning rate")->capture_default_str();
  sub->add_option("--corruption", t.corruption, "Masked fraction of prefix tokens")->capture_default_str();
  sub->add_option("--clip", t.clip, "Global gradient norm cap (0 disables)")->capture_default_str();
  sub->add_option("--reconstruction-weight", t.w_rec)->capture_default_str();
  sub->add_option("--autoregressive-weight", t.w_ar)->capture_default_str();
  sub->add_option("--optimizer", t.optimizer)->check(CLI::IsMember({"sgd", "adam"}))->capture_default_str();
  sub->add_option("--seed", t.seed)->capture_default_str();
}

bc::lm::LossCallback progress(const char* what, std::size_t steps) {
  const std::size_t every = std::max<std::size_t>(1, steps / 10);
  return [what, every, steps](std::size_t step, double loss) {
    if (step % every == 0 || step + 1 == steps) std::fprintf(stderr, "%s step %zu loss %.4f\n", what, step, loss);
  };
}

std::vector<std::string> read_text_lines(const std::string& path) {
  std::vector<std::string> out;
  for (auto& line : bc::read_lines(path)) {
    if (!line.empty()) out.push_back(std::move(line));
  }
  return out;
}

std::vector<bc::lm::PrefixSample> encode_records(const std::vector<bc::CopywritingRecord>& records,
                                                 const bc::Catalog& catalog, const bc::lm::Vocab& vocab,
                                                 const bc::lm::EncodeOptions& options) {
  std::vector<bc::lm::PrefixSample> samples;
  for (std::size_t i = 0; i < records.size(); ++i) {
    try {
      samples.push_back(bc::lm::encode_sample(records[i].combination, catalog, records[i].content, vocab, options));
    } catch (const bc::Error& e) {
      throw bc::Error("record " + std::to_string(i + 1) + ": " + e.what());
    }
  }
  return samples;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"bundlecopy: multi-product combination selection and copywriting generation"};
  app.set_version_flag("--version", std::string(bc::kVersion));
  app.require_subcommand(1);
  app.fallthrough(false);

  // synthesize ---------------------------------------------------------------
  bc::SyntheticConfig syn;
  std::string syn_out;
  auto* synth = app.add_subcommand("synthesize", "Write the seeded synthetic corpus");
  synth->add_option("--out", syn_out, "Output directory")->required();
  synth->add_option("--seed", syn.seed)->capture_default_str();
  synth->add_option("--combinations", syn.combinations)->capture_default_str();
  synth->add_option("--pretrain-texts", syn.pretrain_texts)->capture_default_str();
  synth->callback([&] {
    const auto corpus = bc::generate_synthetic(syn);
    bc::write_synthetic(syn_out, corpus);
    std::printf("products=%zu combinations=%zu records=%zu pretrain_texts=%zu\n", corpus.products.size(),
                corpus.combinations.size(), corpus.records.size(), corpus.pretrain_corpus.size());
  });

  // ingest / assign-topics ---------------------------------------------------
  std::string in_catalog, in_rules, in_out;
  auto* ingest = app.add_subcommand("ingest", "Validate a catalog file and optionally assign topics");
  ingest->add_option("--catalog", in_catalog)->required()->check(CLI::ExistingFile);
  ingest->add_option("--rules", in_rules, "Topic rules file")->check(CLI::ExistingFile);
  ingest->add_option("--out", in_out, "Validated catalog output");
  ingest->callback([&] {
    auto products = bc::load_catalog(in_catalog);
    if (!in_rules.empty()) products = bc::assign_topics(std::move(products), bc::load_topic_rules(in_rules));
    const bc::Catalog catalog(products);
    if (!in_out.empty()) bc::save_catalog(in_out, products);
    std::printf("products=%zu topics=%zu\n", catalog.size(), catalog.topics().size());
  });

  std::string at_catalog, at_rules, at_out;
  auto* assign = app.add_subcommand("assign-topics", "Assign topic channels with first-match rules");
  assign->add_option("--catalog", at_catalog)->required()->check(CLI::ExistingFile);
  assign->add_option("--rules", at_rules)->required()->check(CLI::ExistingFile);
  assign->add_option("--out", at_out)->required();
  assign->callback([&] {
    const auto products = bc::assign_topics(bc::load_catalog(at_catalog), bc::load_topic_rules(at_rules));
    bc::save_catalog(at_out, products);
    std::size_t unassigned = 0;
    for (const auto& p : products) unassigned += p.topic == std::string(bc::kUnassignedTopic);
    std::printf("products=%zu unassigned=%zu\n", products.size(), unassigned);
  });

  // train-words ----------------------------------------------------------------
  std::string tw_catalog, tw_out, tw_annotated;
  bc::ProductWordConfig tw_config;
  auto* train_words = app.add_subcommand("train-words", "Train the product word predictor on gold labels");
  train_words->add_option("--catalog", tw_catalog)->required()->check(CLI::ExistingFile);
  train_words->add_option("--out", tw_out)->required();
  train_words->add_option("--annotated", tw_annotated, "Also write the catalog with predicted words");
  train_words->add_option("--epochs", tw_config.epochs)->capture_default_str();
  train_words->add_option("--top-k", tw_config.top_k)->capture_default_str();
  train_words->add_option("--min-confidence", tw_config.min_confidence)->capture_default_str();
  train_words->add_option("--seed", tw_config.seed)->capture_default_str();
  train_words->callback([&] {
    const auto products = bc::load_catalog(tw_catalog);
    const auto labeled = bc::labeled_from_catalog(products);
    const auto model = bc::ProductWordModel::train(labeled, tw_config);
    model.save(tw_out);
    std::size_t hits = 0;
    for (const auto& l : labeled) hits += model.top_word(l.product) == l.gold.front();
    if (!tw_annotated.empty()) bc::save_catalog(tw_annotated, bc::annotate_product_words(model, products));
    std::printf("words=%zu labeled=%zu top1_accuracy=%.4f\n", model.vocabulary().size(), labeled.size(),
                labeled.empty() ? 0.0 : static_cast<double>(hits) / static_cast<double>(labeled.size()));
  });

  // extract-patterns -----------------------------------------------------------
  std::string ep_catalog, ep_combos, ep_words, ep_out;
  std::size_t ep_min_support = 2;
  auto* extract = app.add_subcommand("extract-patterns", "Mine attribute patterns from curated combinations");
  extract->add_option("--catalog", ep_catalog)->required()->check(CLI::ExistingFile);
  extract->add_option("--combinations", ep_combos)->required()->check(CLI::ExistingFile);
  extract->add_option("--words", ep_words, "Product word model")->required()->check(CLI::ExistingFile);
  extract->add_option("--min-support", ep_min_support)->capture_default_str();
  extract->add_option("--out", ep_out)->required();
  extract->callback([&] {
    const bc::Catalog catalog = open_catalog(ep_catalog, ep_words);
    const auto model = bc::ProductWordModel::load(ep_words);
    const auto table = bc::extract_patterns(bc::load_combinations(ep_combos), catalog, model, ep_min_support);
    table.save(ep_out);
    std::printf("patterns=%zu topics=%zu\n", table.size(), table.topics().size());
  });

  // select -----------------------------------------------------------------------
  std::string se_method = "pattern", se_catalog, se_topic, se_patterns, se_words, se_out;
  std::size_t se_n = 10, se_size = 2;
  std::uint64_t se_seed = 1;
  auto* select = app.add_subcommand("select", "Generate candidate combinations");
  select->add_option("--method", se_method)->check(CLI::IsMember({"random", "cid", "pattern"}))->capture_default_str();
  select->add_option("--catalog", se_catalog)->required()->check(CLI::ExistingFile);
  select->add_option("--topic", se_topic)->required();
  select->add_option("--n", se_n)->capture_default_str();
  select->add_option("--size", se_size, "Slots per combination (random, cid)")->capture_default_str();
  select->add_option("--seed", se_seed)->capture_default_str();
  select->add_option("--patterns", se_patterns, "Pattern table (pattern method)");
  select->add_option("--words", se_words, "Product word model (pattern method)");
  select->add_option("--out", se_out, "Output file, stdout by default");
  select->callback([&] {
    std::vector<bc::Combination> out;
    if (se_method == "pattern") {
      if (se_patterns.empty() || se_words.empty()) {
        throw bc::Error("select --method pattern needs --patterns and --words");
      }
      const bc::Catalog catalog = open_catalog(se_catalog, se_words);
      const auto model = bc::ProductWordModel::load(se_words);
      const bc::SlotIndex slots(catalog, model);
      out = bc::select_pattern(catalog, slots, bc::PatternTable::load(se_patterns), se_topic, se_n, se_seed);
    } else {
      const bc::Catalog catalog = open_catalog(se_catalog, se_words);
      out = se_method == "random" ? bc::select_random(catalog, se_topic, se_size, se_n, se_seed)
                                  : bc::select_cid(catalog, se_topic, se_size, se_n, se_seed);
    }
    emit(se_out, combinations_text(out));
  });

  // train-arbitrator --------------------------------------------------------------
  std::string ta_variant = "strict", ta_catalog, ta_combos, ta_words, ta_out;
  double ta_ratio = 1.0;
  std::uint64_t ta_seed = 1;
  bc::ArbitratorConfig ta_config;
  auto* train_arb = app.add_subcommand("train-arbitrator", "Train a strict or normal combination arbitrator");
  train_arb->add_option("--variant", ta_variant)->check(CLI::IsMember({"strict", "normal"}))->capture_default_str();
  train_arb->add_option("--catalog", ta_catalog)->required()->check(CLI::ExistingFile);
  train_arb->add_option("--combinations", ta_combos)->required()->check(CLI::ExistingFile);
  train_arb->add_option("--words", ta_words, "Product word model")->check(CLI::ExistingFile);
  train_arb->add_option("--ratio", ta_ratio, "Negatives per positive")->capture_default_str();
  train_arb->add_option("--seed", ta_seed)->capture_default_str();
  train_arb->add_option("--epochs", ta_config.epochs)->capture_default_str();
  train_arb->add_option("--threshold", ta_config.threshold)->capture_default_str();
  train_arb->add_option("--out", ta_out)->required();
  train_arb->callback([&] {
    const bc::Catalog catalog = open_catalog(ta_catalog, ta_words);
    const auto variant = bc::parse_variant(ta_variant);
    const auto pairs = bc::build_training_pairs(bc::load_combinations(ta_combos), catalog, variant, ta_ratio, ta_seed);
    ta_config.seed = bc::mix_seed(ta_seed, 0xA7B);
    const auto model = bc::ArbitratorModel::train(pairs, catalog, variant, ta_config);
    model.save(ta_out);
    std::printf("variant=%s pairs=%zu train_accuracy=%.4f\n", ta_variant.c_str(), pairs.size(),
                bc::pair_accuracy(model, pairs, catalog));
  });

  // score / filter -----------------------------------------------------------------
  std::string sc_model, sc_catalog, sc_combos, sc_words;
  auto* score = app.add_subcommand("score", "Score combinations with an arbitrator");
  score->add_option("--model", sc_model)->required()->check(CLI::ExistingFile);
  score->add_option("--catalog", sc_catalog)->required()->check(CLI::ExistingFile);
  score->add_option("--combinations", sc_combos)->required()->check(CLI::ExistingFile);
  score->add_option("--words", sc_words)->check(CLI::ExistingFile);
  score->callback([&] {
    const bc::Catalog catalog = open_catalog(sc_catalog, sc_words);
    const auto model = bc::ArbitratorModel::load(sc_model);
    const auto combos = bc::load_combinations(sc_combos);
    for (const auto& c : combos) {
      std::printf("%.6f\t%s\n", bc::score_combination(model, c, catalog), bc::text::join(c.products, ",").c_str());
    }
    std::printf("# acceptance_rate=%.4f\n", bc::acceptance_rate(model, combos, catalog));
  });

  std::string fi_model, fi_catalog, fi_combos, fi_words, fi_out;
  std::optional<double> fi_threshold;
  auto* filter = app.add_subcommand("filter", "Keep combinations the strict arbitrator accepts");
  filter->add_option("--model", fi_model)->required()->check(CLI::ExistingFile);
  filter->add_option("--catalog", fi_catalog)->required()->check(CLI::ExistingFile);
  filter->add_option("--combinations", fi_combos)->required()->check(CLI::ExistingFile);
  filter->add_option("--words", fi_words)->check(CLI::ExistingFile);
  filter->add_option("--threshold", fi_threshold, "Defaults to the model threshold");
  filter->add_option("--out", fi_out);
  filter->callback([&] {
    const bc::Catalog catalog = open_catalog(fi_catalog, fi_words);
    const auto model = bc::ArbitratorModel::load(fi_model);
    const auto combos = bc::load_combinations(fi_combos);
    const auto kept = bc::filter_combinations(model, combos, catalog, fi_threshold.value_or(model.threshold()));
    emit(fi_out, combinations_text(kept));
    std::fprintf(stderr, "kept=%zu of %zu\n", kept.size(), combos.size());
  });

  // pretrain -----------------------------------------------------------------------
  std::string pt_catalog, pt_corpus, pt_records, pt_words, pt_out;
  ModelOptions pt_model;
  TrainOptions pt_train;
  pt_train.steps = 1000;
  auto* pretrain = app.add_subcommand("pretrain", "Domain pretraining of the prefix LM from scratch");
  pretrain->add_option("--catalog", pt_catalog, "Catalog whose text joins the vocabulary")->required()->check(CLI::ExistingFile);
  pretrain->add_option("--corpus", pt_corpus, "Domain texts, one per line")->required()->check(CLI::ExistingFile);
  pretrain->add_option("--records", pt_records, "Copy records whose text joins the vocabulary")->check(CLI::ExistingFile);
  pretrain->add_option("--words", pt_words)->check(CLI::ExistingFile);
  pretrain->add_option("--out", pt_out)->required();
  add_model_options(pretrain, pt_model);
  add_train_options(pretrain, pt_train);
  pretrain->callback([&] {
    const bc::Catalog catalog = open_catalog(pt_catalog, pt_words);
    const auto corpus = read_text_lines(pt_corpus);
    std::vector<std::string> texts = bc::lm::prefix_texts(catalog);
    texts.insert(texts.end(), corpus.begin(), corpus.end());
    if (!pt_records.empty()) {
      for (const auto& r : bc::load_records(pt_records)) texts.push_back(r.content);
    }
    const auto vocab = bc::lm::Vocab::build(texts);
    bc::lm::ModelConfig mc{static_cast<int>(vocab.size()), pt_model.layers, pt_model.width, pt_model.heads,
                           pt_model.ff, pt_model.max_len, 0.02, pt_train.seed};
    auto model = bc::lm::Model::init(mc);
    const auto cfg = pt_train.config();
    const auto losses = bc::lm::pretrain(model, corpus, vocab, cfg, progress("pretrain", cfg.steps));
    bc::lm::save_checkpoint(pt_out, model, vocab);
    std::printf("vocab=%zu parameters=%zu first_loss=%.4f last_loss=%.4f\n", vocab.size(),
                model.params.parameter_count(), losses.front(), losses.back());
  });

  // finetune -----------------------------------------------------------------------
  std::string ft_catalog, ft_records, ft_words, ft_init, ft_out, ft_heldout;
  std::string ft_corpus;
  ModelOptions ft_model;
  TrainOptions ft_train;
  std::size_t ft_words_per_product = 2;
  auto* finetune = app.add_subcommand("finetune", "Fine-tune on copywriting records");
  finetune->add_option("--catalog", ft_catalog)->required()->check(CLI::ExistingFile);
  finetune->add_option("--records", ft_records)->required()->check(CLI::ExistingFile);
  finetune->add_option("--words", ft_words)->check(CLI::ExistingFile);
  finetune->add_option("--init", ft_init, "Pretrained checkpoint; from scratch when absent")->check(CLI::ExistingFile);
  finetune->add_option("--corpus", ft_corpus, "Extra vocabulary text when starting from scratch")->check(CLI::ExistingFile);
  finetune->add_option("--heldout", ft_heldout, "Records for a held-out perplexity report")->check(CLI::ExistingFile);
  finetune->add_option("--words-per-product", ft_words_per_product)->capture_default_str();
  finetune->add_option("--out", ft_out)->required();
  add_model_options(finetune, ft_model);
  add_train_options(finetune, ft_train);
  finetune->callback([&] {
    const bc::Catalog catalog = open_catalog(ft_catalog, ft_words);
    const auto records = bc::load_records(ft_records);
    bc::lm::Model model;
    bc::lm::Vocab vocab;
    if (!ft_init.empty()) {
      auto ck = bc::lm::load_checkpoint(ft_init);
      model = std::move(ck.model);
      vocab = std::move(ck.vocab);
    } else {
      std::vector<std::string> texts = bc::lm::prefix_texts(catalog);
      for (const auto& r : records) texts.push_back(r.content);
      if (!ft_corpus.empty()) {
        for (auto& line : read_text_lines(ft_corpus)) texts.push_back(std::move(line));
      }
      vocab = bc::lm::Vocab::build(texts);
      model = bc::lm::Model::init({static_cast<int>(vocab.size()), ft_model.layers, ft_model.width, ft_model.heads,
                                   ft_model.ff, ft_model.max_len, 0.02, ft_train.seed});
    }
    const bc::lm::EncodeOptions enc{ft_words_per_product, static_cast<std::size_t>(model.config.max_len)};
    const auto samples = encode_records(records, catalog, vocab, enc);
    const auto cfg = ft_train.config();
    const auto losses = bc::lm::finetune(model, samples, cfg, progress("finetune", cfg.steps));
    bc::lm::save_checkpoint(ft_out, model, vocab);
    std::printf("samples=%zu first_loss=%.4f last_loss=%.4f", samples.size(), losses.front(), losses.back());
    if (!ft_heldout.empty()) {
      const auto held = encode_records(bc::load_records(ft_heldout), catalog, vocab, enc);
      std::printf(" heldout_perplexity=%.4f", bc::lm::perplexity(model, held));
    }
    std::printf("\n");
  });

  // generate -----------------------------------------------------------------------
  std::string ge_checkpoint, ge_catalog, ge_words, ge_combos;
  std::vector<std::string> ge_products;
  bc::lm::DecodeConfig ge_decode;
  std::size_t ge_words_per_product = 2;
  auto* generate = app.add_subcommand("generate", "Beam-search copywriting for combinations");
  generate->add_option("--checkpoint", ge_checkpoint)->required()->check(CLI::ExistingFile);
  generate->add_option("--catalog", ge_catalog)->required()->check(CLI::ExistingFile);
  generate->add_option("--words", ge_words)->check(CLI::ExistingFile);
  auto* ge_products_opt = generate->add_option("--products", ge_products, "Comma-separated product ids")->delimiter(',');
  generate->add_option("--combinations", ge_combos, "Combination file")->check(CLI::ExistingFile)->excludes(ge_products_opt);
  generate->add_option("--beam", ge_decode.beam_size)->capture_default_str();
  generate->add_option("--max-output-len", ge_decode.max_output_len)->capture_default_str();
  generate->add_option("--alpha", ge_decode.length_alpha, "Length normalisation exponent")->capture_default_str();
  generate->add_option("--words-per-product", ge_words_per_product)->capture_default_str();
  generate->callback([&] {
    const bc::Catalog catalog = open_catalog(ge_catalog, ge_words);
    const auto ck = bc::lm::load_checkpoint(ge_checkpoint);
    std::vector<bc::Combination> combos;
    if (!ge_combos.empty()) {
      combos = bc::load_combinations(ge_combos);
    } else if (!ge_products.empty()) {
      combos.push_back(bc::combination_from_ids(catalog, ge_products));
    } else {
      throw bc::Error("generate needs --products or --combinations");
    }
    const bc::lm::EncodeOptions enc{ge_words_per_product, static_cast<std::size_t>(ck.model.config.max_len)};
    for (const auto& c : combos) {
      const auto prefix = bc::lm::encode_prefix(c, catalog, ck.vocab, enc);
      const auto h = bc::lm::generate_beam(ck.model, prefix, ge_decode);
      std::printf("%s\t%s\n", bc::text::join(c.products, ",").c_str(),
                  ck.vocab.decode(bc::lm::strip_eos(h)).c_str());
    }
  });

  // enhance ------------------------------------------------------------------------
  std::string en_lexicon, en_catalog, en_records, en_words, en_out, en_report;
  bc::EnhancementConfig en_config;
  auto* enhance = app.add_subcommand("enhance", "Apply the knowledge-based quality checks to copy records");
  enhance->add_option("--lexicon", en_lexicon)->required()->check(CLI::ExistingFile);
  enhance->add_option("--catalog", en_catalog)->required()->check(CLI::ExistingFile);
  enhance->add_option("--records", en_records)->required()->check(CLI::ExistingFile);
  enhance->add_option("--words", en_words)->required()->check(CLI::ExistingFile);
  enhance->add_option("--min-per-product", en_config.min_per_product)->capture_default_str();
  enhance->add_option("--top-k", en_config.top_k)->capture_default_str();
  enhance->add_option("--min-extra-tokens", en_config.min_extra_tokens)->capture_default_str();
  enhance->add_option("--out", en_out, "Cleaned records")->required();
  enhance->add_option("--report", en_report, "Per-record verdicts (TSV); stdout by default");
  enhance->callback([&] {
    const bc::Catalog catalog = open_catalog(en_catalog, en_words);
    const auto words = bc::ProductWordModel::load(en_words);
    const auto lexicon = bc::ForbiddenLexicon::load(en_lexicon);
    const auto records = bc::load_records(en_records);
    const auto [cleaned, report] = bc::enhance_dataset(records, catalog, lexicon, words, en_config);
    bc::save_records(en_out, cleaned);
    emit(en_report, report.to_tsv());
    std::fprintf(stderr, "approved=%zu total=%zu approval_rate=%.4f\n", report.approved, report.total(),
                 report.approval_rate);
  });

  // evaluate -----------------------------------------------------------------------
  std::string ev_cand, ev_ref;
  char ev_delim = '\t';
  auto* evaluate = app.add_subcommand("evaluate", "Score line-aligned candidate and reference files");
  evaluate->add_option("candidates", ev_cand)->required()->check(CLI::ExistingFile);
  evaluate->add_option("references", ev_ref)->required()->check(CLI::ExistingFile);
  evaluate->add_option("--delimiter", ev_delim)->capture_default_str();
  evaluate->callback([&] {
    const auto cand = bc::read_lines(ev_cand);
    const auto ref = bc::read_lines(ev_ref);
    const auto report = bc::metrics::evaluate_suite(cand, ref);
    std::printf("%s\n%s\n", report.header(ev_delim).c_str(), report.row(ev_delim).c_str());
  });

  // pipeline / serve -----------------------------------------------------------------
  std::string pi_config, pi_out;
  std::vector<std::string> pi_topics;
  std::size_t pi_n = 10;
  std::optional<std::uint64_t> pi_seed;
  auto* pipeline = app.add_subcommand("pipeline", "select -> strict filter -> generate -> enhance");
  pipeline->add_option("--config", pi_config)->required()->check(CLI::ExistingFile);
  pipeline->add_option("--topic", pi_topics, "Topics to run; every patterned topic by default");
  pipeline->add_option("--n", pi_n, "Candidates per topic")->capture_default_str();
  pipeline->add_option("--seed", pi_seed);
  pipeline->add_option("--out", pi_out, "Results (JSON lines); stdout by default");
  pipeline->callback([&] {
    auto config = bc::PipelineConfig::load(pi_config);
    if (pi_seed) config.seed = *pi_seed;
    const auto artifacts = bc::Artifacts::load(config);
    const auto topics = pi_topics.empty() ? artifacts.patterns.topics() : pi_topics;
    std::string text;
    std::size_t total = 0, approved = 0;
    for (const auto& topic : topics) {
      for (const auto& r : bc::run_pipeline(artifacts, config, topic, pi_n)) {
        text += bc::serialize_result(r) + "\n";
        ++total;
        approved += r.verdict.approved;
      }
    }
    emit(pi_out, text);
    std::fprintf(stderr, "results=%zu approved=%zu\n", total, approved);
  });

  std::string sv_config, sv_host = "127.0.0.1";
  int sv_port = 8080;
  auto* serve = app.add_subcommand("serve", "Serve the HTTP API");
  serve->add_option("--config", sv_config)->required()->check(CLI::ExistingFile);
  serve->add_option("--host", sv_host)->capture_default_str();
  serve->add_option("--port", sv_port)->capture_default_str();
  serve->callback([&] { bc::serve(bc::PipelineConfig::load(sv_config), sv_host, sv_port); });

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForVersion& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    std::cerr << "error: " << e.what() << "\n\n" << app.help();
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
