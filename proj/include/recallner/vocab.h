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

#ifndef RECALLNER_VOCAB_H_
#define RECALLNER_VOCAB_H_

#include <cstddef>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

namespace recallner {

class VocabError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Token <-> id bijection for a cased WordPiece tokenizer.
//
// Ids [0, base_size) are the original WordPiece vocabulary. Ids at or above
// base_size were appended by enrichment; these "added" tokens are matched
// inside words before WordPiece runs, the way tokenizer added-token tables
// behave, so an enriched token can surface mid-word without a "##" prefix.
//
// Immutable once built. Safe to share between threads.
class Vocabulary {
 public:
  static constexpr std::string_view kCls = "[CLS]";
  static constexpr std::string_view kSep = "[SEP]";
  static constexpr std::string_view kUnk = "[UNK]";
  static constexpr std::string_view kPad = "[PAD]";
  static constexpr std::string_view kContinuationPrefix = "##";

  Vocabulary() = default;

  // Throws VocabError on duplicate/empty tokens or a missing special token.
  // base_size defaults to tokens.size() (no added tokens).
  static Vocabulary from_tokens(std::vector<std::string> tokens,
                                std::optional<std::size_t> base_size = {});

  std::optional<int> find(std::string_view token) const;
  bool contains(std::string_view token) const { return find(token).has_value(); }
  const std::string& token(int id) const;
  int size() const { return static_cast<int>(id_to_token_.size()); }
  const std::vector<std::string>& tokens() const { return id_to_token_; }

  std::size_t base_size() const { return base_size_; }
  bool is_added(int id) const {
    return id >= 0 && static_cast<std::size_t>(id) >= base_size_;
  }
  bool has_added_tokens() const { return base_size_ < id_to_token_.size(); }
  // Longest added token, in code points.
  std::size_t max_added_length() const { return max_added_length_; }

  int cls_id() const { return cls_id_; }
  int sep_id() const { return sep_id_; }
  int unk_id() const { return unk_id_; }
  int pad_id() const { return pad_id_; }
  bool is_special(int id) const {
    return id == cls_id_ || id == sep_id_ || id == unk_id_ || id == pad_id_;
  }

  // Returns a new vocabulary with `tokens` appended as added tokens; tokens
  // already present are skipped. Existing ids never move.
  Vocabulary with_added(const std::vector<std::string>& tokens) const;

  bool operator==(const Vocabulary& other) const {
    return id_to_token_ == other.id_to_token_ && base_size_ == other.base_size_;
  }

 private:
  std::vector<std::string> id_to_token_;
  std::unordered_map<std::string, int> token_to_id_;
  std::size_t base_size_ = 0;
  std::size_t max_added_length_ = 0;
  int cls_id_ = -1;
  int sep_id_ = -1;
  int unk_id_ = -1;
  int pad_id_ = -1;
};

// One token per line, line number = id. If `<path>.added.json` exists it
// records where the base vocabulary ends.
Vocabulary load_vocab(const std::string& path);
void save_vocab(const Vocabulary& vocab, const std::string& path);

}  // namespace recallner

#endif  // RECALLNER_VOCAB_H_
