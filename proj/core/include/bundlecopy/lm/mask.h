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

#include <cstddef>
#include <cstdint>
#include <vector>

namespace bundlecopy::lm {

/// Row-major n x n boolean matrix; (i, j) true when position i may attend to j.
struct BoolMatrix {
  std::size_t rows = 0, cols = 0;
  std::vector<std::uint8_t> cells;

  bool operator()(std::size_t i, std::size_t j) const { return cells[i * cols + j] != 0; }
};

// Prefix positions [0, prefix_len) see each other in both directions; later
// positions see the whole prefix plus themselves and everything to their left.
inline bool mask_allows(std::size_t prefix_len, std::size_t i, std::size_t j) {
  return j < prefix_len || j <= i;
}

BoolMatrix attention_mask(std::size_t prefix_len, std::size_t total_len);

}  // namespace bundlecopy::lm
