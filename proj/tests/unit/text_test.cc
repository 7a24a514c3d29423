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

#include "bundlecopy/text.h"

#include <gtest/gtest.h>

#include "bundlecopy/common.h"

namespace t = bundlecopy::text;

using Tokens = std::vector<std::string>;

TEST(Utf8, RoundTrip) {
  const std::string s = "真皮沙发 Sofa 99元！";
  EXPECT_EQ(t::encode_utf8(t::decode_utf8(s)), s);
  EXPECT_EQ(t::characters("沙发a").size(), 3u);
}

TEST(Normalize, FoldsWidthCaseAndPunctuation) {
  EXPECT_EQ(t::normalize("ＡＢＣ"), "abc");
  EXPECT_EQ(t::normalize("  沙发，茶几。 "), "沙发 茶几");
  EXPECT_EQ(t::normalize("a\t\tb"), "a b");
  EXPECT_EQ(t::normalize(""), "");
}

TEST(Normalize, Idempotent) {
  for (const char* s : {"再加99元享超大容量空气炸锅。", "Hello,  World!", "（限时）秒杀…", "５Ｇ手机"}) {
    const auto once = t::normalize(s);
    EXPECT_EQ(t::normalize(once), once) << s;
  }
}

TEST(Tokenize, CjkPerCharacterLatinAndDigitRunsWhole) {
  EXPECT_EQ(t::tokenize("再加99元"), (Tokens{"再", "加", "99", "元"}));
  EXPECT_EQ(t::tokenize("5G手机 Pro"), (Tokens{"5g", "手", "机", "pro"}));
  EXPECT_TRUE(t::tokenize("，。！").empty());
}

TEST(Contains, ContiguousTokens) {
  EXPECT_TRUE(t::contains_term("选择简约的皮艺沙发", "沙发"));
  EXPECT_FALSE(t::contains_term("沙x发", "沙发"));
  EXPECT_TRUE(t::contains_term("Big SOFA deal", "sofa"));
  EXPECT_FALSE(t::contains_term("sofas", "sofa"));
  EXPECT_FALSE(t::contains_term("anything", ""));
}

TEST(Join, Separator) {
  EXPECT_EQ(t::join({"a", "b", "c"}, "|"), "a|b|c");
  EXPECT_EQ(t::join({}, "|"), "");
}
