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

#ifndef RECALLNER_WORDPIECE_H_
#define RECALLNER_WORDPIECE_H_

#include <cstdint>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "json.hpp"
#include "recallner/curation.h"
#include "recallner/vocab.h"

namespace recallner {

inline constexpr int kNoWord = -1;
inline constexpr std::size_t kMaxWordChars = 100;
inline constexpr int kDefaultMaxLen = 512;

// A pre-split word with its [start, end) code-point span in the source text.
struct Word {
  std::string text;
  int start = 0;
  int end = 0;

  bool operator==(const Word&) const = default;
};

// Whitespace split, then every punctuation character (hyphens included)
// becomes a word of its own.
std::vector<Word> pre_split(std::string_view text);

// A piece of one word; offsets are relative to the word start.
struct Piece {
  std::string token;
  int id = 0;
  int begin = 0;
  int end = 0;
};

// Segments a single pre-split word. Whole-word hits win; otherwise added
// tokens are cut out first (earliest start, longest match) and the remaining
// fragments go through greedy longest-match WordPiece. If any fragment cannot
// be matched the whole word becomes [UNK].
std::vector<Piece> segment_word(std::u32string_view word,
                                const Vocabulary& vocab);

struct Tokenization {
  std::vector<std::string> tokens;
  std::vector<int> ids;
  // Index of the source pre-split word; kNoWord for [CLS]/[SEP].
  std::vector<int> word_index;
  // [start, end) code-point span in the original text; {0, 0} for specials.
  std::vector<std::pair<int, int>> char_offsets;

  std::size_t size() const { return ids.size(); }
  bool is_special(std::size_t i) const { return word_index[i] == kNoWord; }
  // True for every piece of a word except the first.
  bool is_continuation(std::size_t i) const {
    return i > 0 && word_index[i] != kNoWord &&
           word_index[i] == word_index[i - 1];
  }
};

// Wraps the pieces with [CLS]/[SEP] and truncates content to max_len - 2.
Tokenization tokenize(std::string_view text, const Vocabulary& vocab,
                      int max_len = kDefaultMaxLen);

// Orders the candidates by `strategy`, keeps the first ceil(fraction * k)
// and appends the ones not already present. fraction must lie in [0, 1].
Vocabulary enrich(const Vocabulary& vocab,
                  const std::vector<std::string>& candidates, double fraction,
                  OrderStrategy strategy, uint64_t seed);
Vocabulary enrich(const Vocabulary& vocab, const VocabCandidateSet& candidates,
                  double fraction, OrderStrategy strategy, uint64_t seed);

struct TokenCounts {
  std::size_t total = 0;         // content tokens, specials excluded
  std::size_t continuation = 0;  // "##"-prefixed tokens
  std::size_t unk = 0;

  bool operator==(const TokenCounts&) const = default;
};

struct DiffReport {
  std::vector<std::pair<TokenCounts, TokenCounts>> documents;
  TokenCounts total_a;
  TokenCounts total_b;

  nlohmann::json to_json() const;
};

DiffReport tokenization_diff(const std::vector<std::string>& corpus,
                             const Vocabulary& vocab_a,
                             const Vocabulary& vocab_b);

}  // namespace recallner

#endif  // RECALLNER_WORDPIECE_H_
