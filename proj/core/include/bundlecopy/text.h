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

#include <string>
#include <string_view>
#include <vector>

namespace bundlecopy::text {

std::u32string decode_utf8(std::string_view s);
std::string encode_utf8(char32_t cp);
std::string encode_utf8(std::u32string_view s);

// Splits into one string per code point.
std::vector<std::string> characters(std::string_view s);

bool is_cjk(char32_t cp);
bool is_punctuation(char32_t cp);

// Folds full-width ASCII, lowercases Latin, turns punctuation into spaces,
// collapses whitespace.
std::string normalize(std::string_view s);

// Mixed-script tokens over normalize(s): every CJK code point is its own
// token, other characters group into whitespace-delimited runs.
std::vector<std::string> tokenize(std::string_view s);

// True when the tokens of `term` occur as a contiguous run inside `haystack`.
// For CJK this is substring matching; for Latin it is whole-token matching.
bool contains_tokens(const std::vector<std::string>& haystack,
                     const std::vector<std::string>& needle);
bool contains_term(std::string_view text, std::string_view term);

std::string join(const std::vector<std::string>& parts, std::string_view sep);

}  // namespace bundlecopy::text
