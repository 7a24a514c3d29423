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

#include "bundlecopy/lm/checkpoint.h"

#include <bit>
#include <cstring>

#include "bundlecopy/common.h"
#include "json.hpp"

namespace bundlecopy::lm {

using nlohmann::json;

static_assert(std::endian::native == std::endian::little, "checkpoint IO assumes a little-endian host");

namespace {

constexpr char kMagic[4] = {'B', 'C', 'L', 'M'};

template <typename T>
void put(std::string& out, T v) {
  char buf[sizeof(T)];
  std::memcpy(buf, &v, sizeof(T));
  out.append(buf, sizeof(T));
}

template <typename T>
T get(std::string_view bytes, std::size_t& pos) {
  if (pos + sizeof(T) > bytes.size()) throw Error("checkpoint: truncated file");
  T v;
  std::memcpy(&v, bytes.data() + pos, sizeof(T));
  pos += sizeof(T);
  return v;
}

json config_to_json(const ModelConfig& c) {
  return {{"vocab_size", c.vocab_size}, {"layers", c.layers},   {"width", c.width},
          {"heads", c.heads},           {"ff_width", c.ff_width}, {"max_len", c.max_len},
          {"init_scale", c.init_scale}, {"seed", c.seed}};
}

ModelConfig config_from_json(const json& j) {
  ModelConfig c;
  c.vocab_size = j.at("vocab_size");
  c.layers = j.at("layers");
  c.width = j.at("width");
  c.heads = j.at("heads");
  c.ff_width = j.at("ff_width");
  c.max_len = j.at("max_len");
  c.init_scale = j.at("init_scale");
  c.seed = j.at("seed");
  c.validate();
  return c;
}

}  // namespace

std::string serialize_checkpoint(const Model& model, const Vocab& vocab) {
  if (static_cast<std::size_t>(model.config.vocab_size) != vocab.size()) {
    throw Error("checkpoint: model vocab_size does not match the vocabulary");
  }
  json tensors = json::array();
  model.params.visit([&](const std::string& name, const Matrix& t) {
    tensors.push_back({{"name", name}, {"rows", t.rows()}, {"cols", t.cols()}});
  });
  const json header{{"config", config_to_json(model.config)}, {"vocab", vocab.regular_tokens()}, {"tensors", tensors}};
  const std::string header_text = header.dump();

  std::string out(kMagic, 4);
  put<std::uint32_t>(out, kCheckpointVersion);
  put<std::uint64_t>(out, header_text.size());
  out += header_text;
  model.params.visit([&](const std::string&, const Matrix& t) {
    for (Eigen::Index r = 0; r < t.rows(); ++r) {
      for (Eigen::Index c = 0; c < t.cols(); ++c) put<double>(out, t(r, c));
    }
  });
  put<std::uint64_t>(out, fnv1a64(out));
  return out;
}

Checkpoint deserialize_checkpoint(std::string_view bytes) {
  if (bytes.size() < 4 + 4 + 8 + 8 || std::memcmp(bytes.data(), kMagic, 4) != 0) {
    throw Error("checkpoint: bad magic");
  }
  const std::uint64_t stored = [&] {
    std::size_t pos = bytes.size() - 8;
    return get<std::uint64_t>(bytes, pos);
  }();
  if (stored != fnv1a64(bytes.substr(0, bytes.size() - 8))) throw Error("checkpoint: checksum mismatch");

  std::size_t pos = 4;
  const auto version = get<std::uint32_t>(bytes, pos);
  if (version != kCheckpointVersion) throw Error("checkpoint: unsupported version " + std::to_string(version));
  const auto header_len = get<std::uint64_t>(bytes, pos);
  if (pos + header_len > bytes.size() - 8) throw Error("checkpoint: truncated header");
  json header;
  try {
    header = json::parse(bytes.substr(pos, header_len));
  } catch (const json::exception& e) {
    throw Error(std::string("checkpoint: bad header: ") + e.what());
  }
  pos += header_len;

  Checkpoint ck{Model{}, Vocab::from_tokens(header.at("vocab").get<std::vector<std::string>>())};
  ModelConfig config = config_from_json(header.at("config"));
  if (static_cast<std::size_t>(config.vocab_size) != ck.vocab.size()) throw Error("checkpoint: vocab size mismatch");
  ck.model = Model::init(config);

  const auto& table = header.at("tensors");
  std::size_t index = 0;
  ck.model.params.visit([&](const std::string& name, Matrix& t) {
    if (index >= table.size()) throw Error("checkpoint: tensor table too short");
    const auto& entry = table[index++];
    if (entry.at("name").get<std::string>() != name || entry.at("rows").get<Eigen::Index>() != t.rows() ||
        entry.at("cols").get<Eigen::Index>() != t.cols()) {
      throw Error("checkpoint: tensor table does not match config at '" + name + "'");
    }
    for (Eigen::Index r = 0; r < t.rows(); ++r) {
      for (Eigen::Index c = 0; c < t.cols(); ++c) t(r, c) = get<double>(bytes, pos);
    }
  });
  if (index != table.size() || pos != bytes.size() - 8) throw Error("checkpoint: trailing data");
  if (!ck.model.params.all_finite()) throw Error("checkpoint: non-finite weights");
  return ck;
}

void save_checkpoint(const std::filesystem::path& path, const Model& model, const Vocab& vocab) {
  write_file(path, serialize_checkpoint(model, vocab));
}

Checkpoint load_checkpoint(const std::filesystem::path& path) { return deserialize_checkpoint(read_file(path)); }

}  // namespace bundlecopy::lm
