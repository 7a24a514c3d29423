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

#include "bundlecopy/synthetic.h"

#include <array>
#include <cstdio>
#include <set>

#include "bundlecopy/common.h"

namespace bundlecopy {

namespace {

struct CidSpec {
  const char* cid;
  std::vector<const char*> words;  // first is the usual one
  std::vector<const char*> materials;
  std::vector<const char*> specs;
};

struct TopicSpec {
  const char* topic;
  std::vector<const char*> brands;
  std::vector<const char*> scenes;
  std::vector<const char*> benefits;
  std::vector<CidSpec> cids;  // cids[0] is over-stocked
  std::vector<std::pair<int, int>> good_pairs;
};

const std::vector<TopicSpec>& topics() {
  static const std::vector<TopicSpec> specs = {
      {"living_room",
       {"栖木", "暖居", "雅舍", "森语"},
       {"忙碌一天回到家", "周末的午后", "远离城市的喧嚣"},
       {"让客厅更有格调", "享受惬意的居家时光", "打造温馨舒适的家"},
       {{"1001", {"沙发"}, {"真皮", "布艺", "科技布"}, {"三人位", "双人位", "转角"}},
        {"1002", {"茶几"}, {"玻璃", "实木", "岩板"}, {"圆形", "长方形", "小户型"}},
        {"1003", {"电视柜"}, {"实木", "烤漆", "岩板"}, {"伸缩", "落地", "悬挂"}},
        {"1004", {"地毯"}, {"羊毛", "短绒", "混纺"}, {"大尺寸", "圆形", "长方形"}},
        {"1005", {"落地灯", "吊灯"}, {"金属", "布艺", "玻璃"}, {"护眼", "遥控", "调光"}},
        {"1006", {"窗帘"}, {"遮光", "棉麻", "雪尼尔"}, {"定制", "成品", "挂钩式"}},
        {"1007", {"抱枕"}, {"棉麻", "绒面", "真丝"}, {"方形", "腰枕", "靠垫"}}},
       {{0, 1}, {2, 3}, {4, 6}, {5, 4}, {1, 3}}},
      {"kitchen",
       {"厨匠", "味道", "锅师傅", "净源"},
       {"下班回家做顿饭", "周末为家人下厨", "清晨的早餐"},
       {"健康好物美好生活", "轻松做出美味", "让厨房更高效"},
       {{"2001", {"炒锅", "不粘锅"}, {"铸铁", "不锈钢", "麦饭石"}, {"32厘米", "30厘米", "带锅盖"}},
        {"2002", {"净水器"}, {"陶瓷", "反渗透", "超滤"}, {"家用", "厨下式", "大通量"}},
        {"2003", {"空气炸锅"}, {"不锈钢", "陶瓷", "可视"}, {"超大容量", "5升", "4升"}},
        {"2004", {"电饭煲"}, {"球釜", "陶晶", "不锈钢"}, {"4升", "3升", "智能预约"}},
        {"2005", {"菜刀", "刀具"}, {"不锈钢", "大马士革", "高碳钢"}, {"套装", "切片", "斩切"}},
        {"2006", {"砧板"}, {"竹制", "实木", "抗菌"}, {"双面", "加厚", "大号"}},
        {"2007", {"微波炉"}, {"变频", "平板", "不锈钢"}, {"20升", "23升", "家用"}}},
       {{0, 4}, {1, 2}, {3, 6}, {4, 5}, {1, 3}}},
      {"digital",
       {"星速", "极光", "声悦", "迅充"},
       {"通勤路上", "出差旅行途中", "工作学习之余"},
       {"畅享智能生活", "随时保持在线", "效率加倍"},
       {{"3001", {"手机壳"}, {"硅胶", "皮革", "透明"}, {"防摔", "磁吸", "超薄"}},
        {"3002", {"手机"}, {"曲面屏", "直屏", "折叠屏"}, {"5G", "256G", "128G"}},
        {"3003", {"蓝牙耳机", "耳机"}, {"降噪", "入耳式", "头戴式"}, {"无线", "长续航", "运动"}},
        {"3004", {"充电器", "充电宝"}, {"氮化镓", "快充", "无线"}, {"65W", "20000毫安", "便携"}},
        {"3005", {"平板"}, {"高刷屏", "护眼屏", "全面屏"}, {"11英寸", "学习", "办公"}},
        {"3006", {"手表"}, {"智能", "运动", "金属"}, {"心率", "长续航", "防水"}},
        {"3007", {"音箱"}, {"智能", "蓝牙", "木质"}, {"低音炮", "便携", "家用"}}},
       {{0, 1}, {1, 2}, {4, 3}, {5, 2}, {6, 4}}},
      {"bathroom",
       {"浴尚", "清泉", "洁美", "水韵"},
       {"洗去一天的疲惫", "清晨醒来", "睡前沐浴时"},
       {"让浴室干净整洁", "享受舒适沐浴", "打造精致生活"},
       {{"4001", {"毛巾", "浴巾"}, {"纯棉", "竹纤维", "珊瑚绒"}, {"加厚", "吸水", "大号"}},
        {"4002", {"花洒"}, {"增压", "恒温", "不锈钢"}, {"套装", "手持", "顶喷"}},
        {"4003", {"浴室柜"}, {"实木", "陶瓷", "岩板"}, {"组合", "挂墙", "落地"}},
        {"4004", {"浴室镜", "镜子"}, {"智能", "防雾", "铝框"}, {"圆形", "方形", "壁挂"}},
        {"4005", {"地垫"}, {"硅藻泥", "棉质", "防滑"}, {"吸水", "速干", "大号"}},
        {"4006", {"马桶"}, {"智能", "陶瓷", "壁挂"}, {"即热", "虹吸", "节水"}},
        {"4007", {"毛巾架"}, {"不锈钢", "太空铝", "黄铜"}, {"免打孔", "折叠", "加长"}}},
       {{0, 6}, {1, 5}, {2, 3}, {4, 1}, {5, 2}}},
      {"bedroom",
       {"眠语", "梦境", "安枕", "柔家"},
       {"劳累一天后", "安静的夜晚", "慵懒的周末早晨"},
       {"一夜好眠", "让卧室更温馨", "享受舒适睡眠"},
       {{"5001", {"四件套"}, {"纯棉", "真丝", "磨毛"}, {"1.8米", "1.5米", "全棉"}},
        {"5002", {"双人床"}, {"实木", "皮艺", "布艺"}, {"储物", "高箱", "悬浮"}},
        {"5003", {"床垫"}, {"乳胶", "弹簧", "椰棕"}, {"独立袋装", "加厚", "硬质"}},
        {"5004", {"枕头"}, {"乳胶", "记忆棉", "羽绒"}, {"护颈", "一对装", "低枕"}},
        {"5005", {"衣柜"}, {"实木", "板式", "推拉门"}, {"大容量", "四门", "组合"}},
        {"5006", {"床头柜"}, {"实木", "岩板", "轻奢"}, {"带抽屉", "小户型", "简约"}},
        {"5007", {"台灯"}, {"护眼", "金属", "陶瓷"}, {"调光", "充电", "床头"}}},
       {{0, 3}, {1, 2}, {5, 6}, {4, 5}, {2, 3}}},
      {"outdoor",
       {"野行", "山径", "远方", "驼峰"},
       {"周末去露营", "走进大自然", "和朋友去徒步"},
       {"轻松享受户外", "安全又省心", "装备齐全更尽兴"},
       {{"6001", {"帐篷"}, {"自动", "双层", "防雨"}, {"三人", "四人", "速开"}},
        {"6002", {"睡袋"}, {"羽绒", "棉质", "信封式"}, {"加厚", "轻便", "保暖"}},
        {"6003", {"登山鞋"}, {"防水", "透气", "真皮"}, {"高帮", "低帮", "防滑"}},
        {"6004", {"背包", "登山包"}, {"尼龙", "防水", "轻量"}, {"40升", "60升", "双肩"}},
        {"6005", {"折叠椅"}, {"铝合金", "碳钢", "牛津布"}, {"便携", "月亮椅", "加宽"}},
        {"6006", {"卡式炉", "炉具"}, {"铝合金", "不锈钢", "分体"}, {"便携", "大火力", "防风"}},
        {"6007", {"头灯"}, {"强光", "充电", "感应"}, {"防水", "超轻", "远射"}}},
       {{0, 1}, {2, 3}, {4, 5}, {6, 3}, {1, 4}}},
  };
  return specs;
}

constexpr std::array<const char*, 5> kColors = {"白色", "灰色", "黑色", "原木色", "米色"};
constexpr std::array<const char*, 2> kJoiners = {"搭配", "配上"};

template <typename C>
const char* pick(Rng& rng, const C& pool) {
  return pool[rng.index(pool.size())];
}

struct Item {
  std::size_t topic;
  std::size_t cid;
  std::string material;
  std::string word;
};

}  // namespace

ForbiddenLexicon demo_lexicon() {
  return ForbiddenLexicon({
      {"再加*元", false, std::nullopt, 6},
      {"全网最低价", false, std::nullopt, 8},
      {"限时秒杀", false, std::nullopt, 8},
      {"最好", true, std::string("很好"), 8},
      {"绝对", true, std::string("非常"), 8},
  });
}

SyntheticCorpus generate_synthetic(const SyntheticConfig& config) {
  if (config.dominant_products < 2 || config.other_products < 2) {
    throw Error("synthetic: every category needs at least two products");
  }
  SyntheticCorpus out;
  out.lexicon = demo_lexicon();
  Rng rng(config.seed);

  // Catalog.
  std::vector<Item> items;
  std::vector<std::vector<std::vector<std::size_t>>> members(topics().size());
  for (std::size_t t = 0; t < topics().size(); ++t) {
    const TopicSpec& ts = topics()[t];
    TopicRule rule{ts.topic, {}, {}};
    members[t].resize(ts.cids.size());
    for (std::size_t c = 0; c < ts.cids.size(); ++c) {
      const CidSpec& cs = ts.cids[c];
      rule.match_cids.emplace_back(cs.cid);
      const std::size_t count = c == 0 ? config.dominant_products : config.other_products;
      for (std::size_t k = 0; k < count; ++k) {
        Item it{t, c, pick(rng, cs.materials), cs.words.size() > 1 && rng.uniform() < 0.3 ? cs.words[1] : cs.words[0]};
        const std::string brand = pick(rng, ts.brands);
        const std::string spec = pick(rng, cs.specs);
        char id[16];
        std::snprintf(id, sizeof id, "p%04zu", items.size() + 1);
        Product p;
        p.id = id;
        p.title = brand + it.material + it.word + spec;
        p.attributes = {{"品牌", brand}, {"材质", it.material}, {"规格", spec}, {"颜色", pick(rng, kColors)}};
        p.cid = cs.cid;
        p.product_words = {{it.word, 1.0}};
        members[t][c].push_back(items.size());
        items.push_back(std::move(it));
        out.products.push_back(std::move(p));
      }
    }
    out.rules.push_back(std::move(rule));
  }

  // Curated combinations and their copy.
  const double flawed_each = config.flawed_fraction / 3.0;
  for (std::size_t i = 0; i < config.combinations; ++i) {
    const std::size_t t = rng.index(topics().size());
    const TopicSpec& ts = topics()[t];
    std::size_t a, b;
    if (rng.uniform() < config.curator_noise) {
      std::vector<std::size_t> all;
      for (const auto& m : members[t]) all.insert(all.end(), m.begin(), m.end());
      a = all[rng.index(all.size())];
      do b = all[rng.index(all.size())];
      while (b == a);
    } else {
      auto [ca, cb] = ts.good_pairs[rng.index(ts.good_pairs.size())];
      if (rng.uniform() < 0.5) std::swap(ca, cb);
      a = members[t][static_cast<std::size_t>(ca)][rng.index(members[t][static_cast<std::size_t>(ca)].size())];
      b = members[t][static_cast<std::size_t>(cb)][rng.index(members[t][static_cast<std::size_t>(cb)].size())];
    }
    Combination combo{{out.products[a].id, out.products[b].id}, ts.topic, Provenance::dataset, std::nullopt};

    const Item& ia = items[a];
    const Item& ib = items[b];
    const std::string scene = pick(rng, ts.scenes);
    std::string benefit = pick(rng, ts.benefits);
    const double roll = rng.uniform();
    std::string content;
    if (roll < flawed_each) {
      content = "再加" + std::to_string(10 * (2 + rng.index(18)) - 1) + "元享" + ib.material + ib.word + "，" + benefit + "。";
    } else if (roll < 2 * flawed_each) {
      content = scene + "，" + benefit + "。";
    } else if (roll < 3 * flawed_each) {
      content = out.products[a].title + "，" + out.products[b].title + "。";
    } else {
      if (roll < 3 * flawed_each + config.alterable_fraction) benefit += "，最好的选择";
      content = scene + "，" + ia.material + ia.word + pick(rng, kJoiners) + ib.material + ib.word + "，" + benefit + "。";
    }
    out.records.push_back({combo, content, ia.word + "+" + ib.word});
    out.combinations.push_back(std::move(combo));
  }

  // Single-product domain texts in the same style.
  for (std::size_t i = 0; i < config.pretrain_texts; ++i) {
    const std::size_t k = rng.index(items.size());
    const TopicSpec& ts = topics()[items[k].topic];
    if (rng.uniform() < 0.5) {
      out.pretrain_corpus.push_back(std::string(pick(rng, ts.scenes)) + "，" + out.products[k].title + "，" +
                                    pick(rng, ts.benefits) + "。");
    } else {
      out.pretrain_corpus.push_back(std::string(pick(rng, ts.scenes)) + "，" + items[k].material + items[k].word +
                                    "，" + pick(rng, ts.benefits) + "。");
    }
  }
  return out;
}

void write_synthetic(const std::filesystem::path& dir, const SyntheticCorpus& corpus) {
  save_catalog(dir / "catalog.jsonl", corpus.products);
  write_file(dir / "topic_rules.json", serialize_topic_rules(corpus.rules));
  save_combinations(dir / "combinations.jsonl", corpus.combinations);
  save_records(dir / "records.jsonl", corpus.records);
  std::string text;
  for (const auto& line : corpus.pretrain_corpus) text += line + "\n";
  write_file(dir / "pretrain.txt", text);
  write_file(dir / "lexicon.jsonl", corpus.lexicon.serialize());
}

}  // namespace bundlecopy
