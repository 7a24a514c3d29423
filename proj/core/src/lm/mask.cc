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

#include "bundlecopy/lm/mask.h"

#include <string>

#include "bundlecopy/common.h"

namespace bundlecopy::lm {

BoolMatrix attention_mask(std::size_t prefix_len, std::size_t total_len) {
  if (prefix_len < 1 || prefix_len > total_len) {
    throw Error("attention_mask: need 1 <= prefix_len <= total_len, got prefix_len=" + std::to_string(prefix_len) +
                " total_len=" + std::to_string(total_len));
  }
  BoolMatrix m{total_len, total_len, std::vector<std::uint8_t>(total_len * total_len, 0)};
  for (std::size_t i = 0; i < total_len; ++i) {
    for (std::size_t j = 0; j < total_len; ++j) m.cells[i * total_len + j] = mask_allows(prefix_len, i, j) ? 1 : 0;
  }
  return m;
}

}  // namespace bundlecopy::lm
