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

#include "recallner/wordpiece.h"

#include <algorithm>
#include <limits>
#include <optional>
#include <stdexcept>

#include "recallner/digest.h"
#include "recallner/text.h"

namespace recallner {

namespace {

// Greedy longest-match-first over one fragment. The first piece is looked up
// bare, every later one with the "##" prefix.
bool wordpiece_fragment(std::u32string_view fragment, int offset,
                        const Vocabulary& vocab, std::vector<Piece>& out) {
  std::size_t start = 0;
  while (start < fragment.size()) {
    std::size_t end = fragment.size();
    std::optional<int> hit;
    std::string piece;
    while (start < end) {
      piece = text::encode_utf8(fragment.substr(start, end - start));
      if (start > 0) piece.insert(0, Vocabulary::kContinuationPrefix);
      hit = vocab.find(piece);
      if (hit) break;
      --end;
    }
    if (!hit) return false;
    out.push_back({std::move(piece), *hit, offset + static_cast<int>(start),
                   offset + static_cast<int>(end)});
    start = end;
  }
  return true;
}

struct AddedMatch {
  std::size_t start;
  std::size_t length;
  int id;
};

std::optional<AddedMatch> next_added(std::u32string_view word, std::size_t from,
                                     const Vocabulary& vocab) {
  for (std::size_t i = from; i < word.size(); ++i) {
    std::size_t longest = std::min(vocab.max_added_length(), word.size() - i);
    for (std::size_t len = longest; len > 0; --len) {
      auto id = vocab.find(text::encode_utf8(word.substr(i, len)));
      if (id && vocab.is_added(*id)) return AddedMatch{i, len, *id};
    }
  }
  return std::nullopt;
}

std::vector<Piece> unk_word(const Vocabulary& vocab, std::size_t length) {
  return {Piece{std::string(Vocabulary::kUnk), vocab.unk_id(), 0,
                static_cast<int>(length)}};
}

}  // namespace

std::vector<Word> pre_split(std::string_view text) {
  std::vector<Word> words;
  std::u32string cps = text::decode_utf8(text);
  std::u32string current;
  int current_start = 0;
  auto flush = [&](int end) {
    if (!current.empty()) {
      words.push_back({text::encode_utf8(current), current_start, end});
      current.clear();
    }
  };
  for (std::size_t i = 0; i < cps.size(); ++i) {
    const char32_t c = cps[i];
    const int pos = static_cast<int>(i);
    if (text::is_whitespace(c)) {
      flush(pos);
    } else if (text::is_punctuation(c)) {
      flush(pos);
      words.push_back({text::encode_utf8(c), pos, pos + 1});
    } else {
      if (current.empty()) current_start = pos;
      current.push_back(c);
    }
  }
  flush(static_cast<int>(cps.size()));
  return words;
}

std::vector<Piece> segment_word(std::u32string_view word,
                                const Vocabulary& vocab) {
  if (word.empty()) return {};
  if (word.size() > kMaxWordChars) return unk_word(vocab, word.size());

  std::string whole = text::encode_utf8(word);
  if (auto id = vocab.find(whole)) {
    return {Piece{std::move(whole), *id, 0, static_cast<int>(word.size())}};
  }

  std::vector<Piece> pieces;
  std::size_t pos = 0;
  if (vocab.has_added_tokens()) {
    while (auto match = next_added(word, pos, vocab)) {
      if (match->start > pos &&
          !wordpiece_fragment(word.substr(pos, match->start - pos),
                              static_cast<int>(pos), vocab, pieces)) {
        return unk_word(vocab, word.size());
      }
      pieces.push_back({vocab.token(match->id), match->id,
                        static_cast<int>(match->start),
                        static_cast<int>(match->start + match->length)});
      pos = match->start + match->length;
    }
  }
  if (pos < word.size() &&
      !wordpiece_fragment(word.substr(pos), static_cast<int>(pos), vocab,
                          pieces)) {
    return unk_word(vocab, word.size());
  }
  return pieces;
}

Tokenization tokenize(std::string_view text, const Vocabulary& vocab,
                      int max_len) {
  if (max_len < 2) throw std::invalid_argument("max_len must be >= 2");
  const std::size_t budget = static_cast<std::size_t>(max_len) - 2;

  Tokenization out;
  auto push = [&out](std::string token, int id, int word, int begin, int end) {
    out.tokens.push_back(std::move(token));
    out.ids.push_back(id);
    out.word_index.push_back(word);
    out.char_offsets.emplace_back(begin, end);
  };
  push(std::string(Vocabulary::kCls), vocab.cls_id(), kNoWord, 0, 0);

  std::vector<Word> words = pre_split(text);
  std::size_t content = 0;
  for (std::size_t w = 0; w < words.size() && content < budget; ++w) {
    std::u32string cps = text::decode_utf8(words[w].text);
    for (auto& piece : segment_word(cps, vocab)) {
      if (content == budget) break;
      push(std::move(piece.token), piece.id, static_cast<int>(w),
           words[w].start + piece.begin, words[w].start + piece.end);
      ++content;
    }
  }

  push(std::string(Vocabulary::kSep), vocab.sep_id(), kNoWord, 0, 0);
  return out;
}

Vocabulary enrich(const Vocabulary& vocab,
                  const std::vector<std::string>& candidates, double fraction,
                  OrderStrategy strategy, uint64_t seed) {
  if (!(fraction >= 0.0 && fraction <= 1.0)) {
    throw std::invalid_argument("enrichment fraction must be in [0, 1]");
  }
  std::vector<std::string> ordered =
      order_candidates(candidates, strategy, seed);
  ordered.resize(ceil_fraction(fraction, ordered.size()));
  return vocab.with_added(ordered);
}

Vocabulary enrich(const Vocabulary& vocab, const VocabCandidateSet& candidates,
                  double fraction, OrderStrategy strategy, uint64_t seed) {
  return enrich(vocab, candidates.tokens, fraction, strategy, seed);
}

namespace {

TokenCounts count_tokens(const Tokenization& t, const Vocabulary& vocab) {
  TokenCounts counts;
  for (std::size_t i = 0; i < t.size(); ++i) {
    if (t.is_special(i)) continue;
    ++counts.total;
    if (t.ids[i] == vocab.unk_id()) ++counts.unk;
    if (t.tokens[i].rfind(Vocabulary::kContinuationPrefix, 0) == 0) {
      ++counts.continuation;
    }
  }
  return counts;
}

void accumulate(TokenCounts& into, const TokenCounts& c) {
  into.total += c.total;
  into.continuation += c.continuation;
  into.unk += c.unk;
}

nlohmann::json counts_json(const TokenCounts& c) {
  return {{"total", c.total}, {"continuation", c.continuation}, {"unk", c.unk}};
}

nlohmann::json delta_json(const TokenCounts& a, const TokenCounts& b) {
  auto d = [](std::size_t x, std::size_t y) {
    return static_cast<long long>(y) - static_cast<long long>(x);
  };
  return {{"total", d(a.total, b.total)},
          {"continuation", d(a.continuation, b.continuation)},
          {"unk", d(a.unk, b.unk)}};
}

}  // namespace

DiffReport tokenization_diff(const std::vector<std::string>& corpus,
                             const Vocabulary& vocab_a,
                             const Vocabulary& vocab_b) {
  constexpr int kUnbounded = std::numeric_limits<int>::max();
  DiffReport report;
  for (const auto& doc : corpus) {
    TokenCounts a = count_tokens(tokenize(doc, vocab_a, kUnbounded), vocab_a);
    TokenCounts b = count_tokens(tokenize(doc, vocab_b, kUnbounded), vocab_b);
    accumulate(report.total_a, a);
    accumulate(report.total_b, b);
    report.documents.emplace_back(a, b);
  }
  return report;
}

nlohmann::json DiffReport::to_json() const {
  nlohmann::json docs = nlohmann::json::array();
  for (std::size_t i = 0; i < documents.size(); ++i) {
    const auto& [a, b] = documents[i];
    docs.push_back({{"document", i},
                    {"a", counts_json(a)},
                    {"b", counts_json(b)},
                    {"delta", delta_json(a, b)}});
  }
  return {{"documents", docs},
          {"aggregate",
           {{"a", counts_json(total_a)},
            {"b", counts_json(total_b)},
            {"delta", delta_json(total_a, total_b)}}}};
}

}  // namespace recallner
