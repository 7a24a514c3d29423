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

#include <cstdint>
#include <filesystem>
#include <string>
#include <string_view>

#include "bundlecopy/lm/model.h"
#include "bundlecopy/lm/vocab.h"

namespace bundlecopy::lm {

// Binary checkpoint layout (all integers little-endian):
//   magic "BCLM" | u32 version | u64 header_len | header JSON
//   | f64 weights for every tensor in Params::visit order, row-major
//   | u64 FNV-1a-64 of all preceding bytes
// The header carries the model config, the regular vocabulary tokens and a
// tensor table of {name, rows, cols}.
inline constexpr std::uint32_t kCheckpointVersion = 1;

struct Checkpoint {
  Model model;
  Vocab vocab;
};

std::string serialize_checkpoint(const Model& model, const Vocab& vocab);
Checkpoint deserialize_checkpoint(std::string_view bytes);
void save_checkpoint(const std::filesystem::path& path, const Model& model, const Vocab& vocab);
Checkpoint load_checkpoint(const std::filesystem::path& path);

}  // namespace bundlecopy::lm
