// Copyright (c) 2026 The RecallNER Authors. All Rights Reserved.
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

#include "recallner/checkpoint.h"

#include <bit>
#include <cstring>

#include "recallner/digest.h"

namespace recallner {

namespace {

constexpr char kMagic[8] = {'R', 'N', 'E', 'R', 'C', 'K', 'P', 'T'};
constexpr int kFormatVersion = 1;

void put_u32(std::string& out, uint32_t v) {
  for (int i = 0; i < 4; ++i) out.push_back(static_cast<char>((v >> (8 * i)) & 0xff));
}

void put_u64(std::string& out, uint64_t v) {
  for (int i = 0; i < 8; ++i) out.push_back(static_cast<char>((v >> (8 * i)) & 0xff));
}

uint32_t get_u32(const std::string& in, std::size_t pos) {
  uint32_t v = 0;
  for (int i = 0; i < 4; ++i) {
    v |= static_cast<uint32_t>(static_cast<unsigned char>(in[pos + i])) << (8 * i);
  }
  return v;
}

uint64_t get_u64(const std::string& in, std::size_t pos) {
  uint64_t v = 0;
  for (int i = 0; i < 8; ++i) {
    v |= static_cast<uint64_t>(static_cast<unsigned char>(in[pos + i])) << (8 * i);
  }
  return v;
}

}  // namespace

void save_checkpoint(const Checkpoint& ckpt, const std::string& path) {
  nlohmann::json tensors = nlohmann::json::array();
  std::string payload;
  ckpt.params.for_each([&](const std::string& name, const Matrix& m) {
    tensors.push_back({{"name", name}, {"rows", m.rows()}, {"cols", m.cols()}});
    for (Eigen::Index i = 0; i < m.size(); ++i) {
      put_u32(payload, std::bit_cast<uint32_t>(static_cast<float>(m.data()[i])));
    }
  });
  nlohmann::json header = {{"format_version", kFormatVersion},
                           {"config", to_json(ckpt.params.config)},
                           {"seed", ckpt.seed},
                           {"step", ckpt.step},
                           {"tensors", tensors}};
  const std::string header_bytes = header.dump();
  std::string out(kMagic, sizeof(kMagic));
  put_u64(out, header_bytes.size());
  out += header_bytes;
  out += payload;
  write_file(path, out);
}

Checkpoint load_checkpoint(const std::string& path) {
  const std::string in = read_file(path);
  if (in.size() < 16 || std::memcmp(in.data(), kMagic, sizeof(kMagic)) != 0) {
    throw ModelError(path + ": not a checkpoint");
  }
  const uint64_t header_len = get_u64(in, 8);
  if (16 + header_len > in.size()) throw ModelError(path + ": truncated header");
  auto header = nlohmann::json::parse(in.substr(16, header_len));
  if (header.value("format_version", 0) != kFormatVersion) {
    throw ModelError(path + ": unsupported checkpoint version");
  }

  Checkpoint ckpt;
  ckpt.seed = header.value("seed", uint64_t{0});
  ckpt.step = header.value("step", int64_t{0});
  ckpt.params = init_params(model_config_from_json(header.at("config")));

  const auto& tensors = header.at("tensors");
  std::size_t pos = 16 + header_len;
  std::size_t index = 0;
  ckpt.params.for_each([&](const std::string& name, Matrix& m) {
    if (index >= tensors.size()) throw ModelError(path + ": missing tensors");
    const auto& t = tensors[index++];
    if (t.at("name") != name || t.at("rows").get<Eigen::Index>() != m.rows() ||
        t.at("cols").get<Eigen::Index>() != m.cols()) {
      throw ModelError(path + ": tensor layout mismatch at " + name);
    }
    if (pos + 4 * static_cast<std::size_t>(m.size()) > in.size()) {
      throw ModelError(path + ": truncated tensor data");
    }
    for (Eigen::Index i = 0; i < m.size(); ++i) {
      m.data()[i] = std::bit_cast<float>(get_u32(in, pos));
      pos += 4;
    }
  });
  if (index != tensors.size() || pos != in.size()) {
    throw ModelError(path + ": trailing or extra tensors");
  }
  return ckpt;
}

}  // namespace recallner
