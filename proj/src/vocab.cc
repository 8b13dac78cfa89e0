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

#include "recallner/vocab.h"

#include <algorithm>
#include <filesystem>

#include "json.hpp"
#include "recallner/digest.h"
#include "recallner/text.h"

namespace recallner {

Vocabulary Vocabulary::from_tokens(std::vector<std::string> tokens,
                                   std::optional<std::size_t> base_size) {
  Vocabulary vocab;
  vocab.base_size_ = base_size.value_or(tokens.size());
  if (vocab.base_size_ > tokens.size()) {
    throw VocabError("base size exceeds vocabulary size");
  }
  vocab.token_to_id_.reserve(tokens.size());
  for (std::size_t i = 0; i < tokens.size(); ++i) {
    if (tokens[i].empty()) {
      throw VocabError("empty token at id " + std::to_string(i));
    }
    auto [it, inserted] =
        vocab.token_to_id_.emplace(tokens[i], static_cast<int>(i));
    if (!inserted) {
      throw VocabError("duplicate token '" + tokens[i] + "' at ids " +
                       std::to_string(it->second) + " and " +
                       std::to_string(i));
    }
    if (i >= vocab.base_size_) {
      vocab.max_added_length_ =
          std::max(vocab.max_added_length_, text::length(tokens[i]));
    }
  }
  vocab.id_to_token_ = std::move(tokens);

  auto special = [&vocab](std::string_view name) {
    auto id = vocab.find(name);
    if (!id) throw VocabError("missing special token " + std::string(name));
    return *id;
  };
  vocab.cls_id_ = special(kCls);
  vocab.sep_id_ = special(kSep);
  vocab.unk_id_ = special(kUnk);
  vocab.pad_id_ = special(kPad);
  return vocab;
}

std::optional<int> Vocabulary::find(std::string_view token) const {
  auto it = token_to_id_.find(std::string(token));
  if (it == token_to_id_.end()) return std::nullopt;
  return it->second;
}

const std::string& Vocabulary::token(int id) const {
  if (id < 0 || id >= size()) {
    throw VocabError("token id out of range: " + std::to_string(id));
  }
  return id_to_token_[static_cast<std::size_t>(id)];
}

Vocabulary Vocabulary::with_added(const std::vector<std::string>& tokens) const {
  std::vector<std::string> all = id_to_token_;
  std::unordered_map<std::string, int> seen = token_to_id_;
  for (const auto& t : tokens) {
    if (t.empty()) continue;
    if (seen.emplace(t, static_cast<int>(all.size())).second) all.push_back(t);
  }
  return from_tokens(std::move(all), base_size_);
}

Vocabulary load_vocab(const std::string& path) {
  if (!std::filesystem::exists(path)) {
    throw VocabError("vocabulary not found: " + path);
  }
  std::vector<std::string> lines = text::read_lines(path);
  std::optional<std::size_t> base_size;
  const std::string sidecar = path + ".added.json";
  if (std::filesystem::exists(sidecar)) {
    auto meta = nlohmann::json::parse(read_file(sidecar));
    base_size = meta.at("base_size").get<std::size_t>();
  }
  return Vocabulary::from_tokens(std::move(lines), base_size);
}

void save_vocab(const Vocabulary& vocab, const std::string& path) {
  std::string out;
  for (const auto& t : vocab.tokens()) {
    out += t;
    out += '\n';
  }
  write_file(path, out);
  const std::string sidecar = path + ".added.json";
  if (vocab.has_added_tokens()) {
    nlohmann::json meta = {
        {"base_size", vocab.base_size()},
        {"added_count", vocab.tokens().size() - vocab.base_size()}};
    write_file(sidecar, meta.dump(2) + "\n");
  } else {
    std::filesystem::remove(sidecar);
  }
}

}  // namespace recallner
