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


#include <random>
#include <set>

#include "doctest.h"
#include "recallner/digest.h"
#include "recallner/text.h"
#include "recallner/vocab.h"
#include "recallner/wordpiece.h"
#include "test_util.h"

using namespace recallner;

namespace {

const std::vector<std::string> kSpecials = {"[PAD]", "[UNK]", "[CLS]", "[SEP]"};

Vocabulary toy(std::vector<std::string> extra) {
  std::vector<std::string> all = kSpecials;
  all.insert(all.end(), extra.begin(), extra.end());
  return Vocabulary::from_tokens(all);
}

std::vector<std::string> content(const Tokenization& t) {
  return {t.tokens.begin() + 1, t.tokens.end() - 1};
}

// Reference greedy matcher written independently: at each position try every
// end from the right and take the first vocabulary hit.
std::vector<std::string> oracle_wordpiece(const std::u32string& word,
                                          const std::set<std::string>& vocab) {
  if (vocab.count(text::encode_utf8(word))) return {text::encode_utf8(word)};
  std::vector<std::string> out;
  std::size_t i = 0;
  while (i < word.size()) {
    std::string found;
    std::size_t next = i;
    for (std::size_t j = word.size(); j > i; --j) {
      std::string cand = (i == 0 ? "" : "##") + text::encode_utf8(word.substr(i, j - i));
      if (vocab.count(cand)) {
        found = cand;
        next = j;
        break;
      }
    }
    if (found.empty()) return {"[UNK]"};
    out.push_back(found);
    i = next;
  }
  return out;
}

std::vector<std::string> lines_of(const std::string& path) {
  std::vector<std::string> out;
  std::string bytes = read_file(path);
  std::size_t pos = 0;
  while (pos < bytes.size()) {
    std::size_t nl = bytes.find('\n', pos);
    if (nl == std::string::npos) nl = bytes.size();
    if (nl > pos) out.push_back(bytes.substr(pos, nl - pos));
    pos = nl + 1;
  }
  return out;
}

}  // namespace

TEST_CASE("load_vocab") {
  TempDir tmp("vocab");
  write_file(tmp.file("v.txt"), "[PAD]\n[UNK]\n[CLS]\n[SEP]\nPump\n");
  const Vocabulary v = load_vocab(tmp.file("v.txt"));
  CHECK(v.size() == 5);
  for (int i = 0; i < 5; ++i) CHECK(v.find(v.token(i)) == i);
  CHECK(v.pad_id() == 0);
  CHECK(v.unk_id() == 1);
  CHECK(v.cls_id() == 2);
  CHECK(v.sep_id() == 3);
  CHECK(v.find("Pump") == 4);
  CHECK_FALSE(v.has_added_tokens());

  write_file(tmp.file("dup.txt"), "[PAD]\n[UNK]\n[CLS]\n[SEP]\nPump\nPump\n");
  CHECK_THROWS_AS(load_vocab(tmp.file("dup.txt")), VocabError);
  write_file(tmp.file("nosep.txt"), "[PAD]\n[UNK]\n[CLS]\nPump\n");
  CHECK_THROWS_AS(load_vocab(tmp.file("nosep.txt")), VocabError);
  CHECK_THROWS_AS(load_vocab(tmp.file("missing.txt")), VocabError);
  CHECK_THROWS_AS(v.token(5), VocabError);
}

TEST_CASE("save_vocab keeps the base size") {
  TempDir tmp("vocab-save");
  const Vocabulary base = toy({"a", "##b"});
  const Vocabulary enriched = base.with_added({"ab", "a", "c"});
  CHECK(enriched.size() == base.size() + 2);
  CHECK(enriched.base_size() == static_cast<std::size_t>(base.size()));
  save_vocab(enriched, tmp.file("e.txt"));
  CHECK(load_vocab(tmp.file("e.txt")) == enriched);
  save_vocab(base, tmp.file("b.txt"));
  CHECK(load_vocab(tmp.file("b.txt")) == base);
}

TEST_CASE("pre_split") {
  auto texts = [](const std::vector<Word>& words) {
    std::vector<std::string> out;
    for (const auto& w : words) out.push_back(w.text);
    return out;
  };
  CHECK(texts(pre_split("certified mail.")) ==
        std::vector<std::string>{"certified", "mail", "."});
  CHECK(pre_split("").empty());
  CHECK(texts(pre_split("XRA29-908-28")) ==
        std::vector<std::string>{"XRA29", "-", "908", "-", "28"});
  CHECK(texts(pre_split("(FMI")) == std::vector<std::string>{"(", "FMI"});

  const auto w = pre_split(" caf\xC3\xA9 ok");
  REQUIRE(w.size() == 2);
  CHECK(w[0] == Word{"caf\xC3\xA9", 1, 5});
  CHECK(w[1] == Word{"ok", 6, 8});
}

TEST_CASE("tokenize examples") {
  const Vocabulary base = load_vocab(fixture("golden_base_vocab.txt"));
  const Vocabulary enriched = load_vocab(fixture("golden_enriched_vocab.txt"));
  CHECK(tokenize("Toshiba issued", base).tokens ==
        std::vector<std::string>{"[CLS]", "To", "##shi", "##ba", "issued", "[SEP]"});
  CHECK(tokenize("Toshiba issued", enriched).tokens ==
        std::vector<std::string>{"[CLS]", "Toshiba", "issued", "[SEP]"});
  CHECK(tokenize("", base).tokens == std::vector<std::string>{"[CLS]", "[SEP]"});

  const Vocabulary ab = toy({"a", "##b"});
  CHECK(content(tokenize("ba", ab)) == std::vector<std::string>{"[UNK]"});
  CHECK(content(tokenize("ab", ab)) == std::vector<std::string>{"a", "##b"});
  CHECK(oracle_wordpiece(U"ba", {"a", "##b"}) == std::vector<std::string>{"[UNK]"});
}

TEST_CASE("golden sentence sequences") {
  const Vocabulary base = load_vocab(fixture("golden_base_vocab.txt"));
  const Vocabulary enriched = load_vocab(fixture("golden_enriched_vocab.txt"));
  std::string sentence = read_file(fixture("golden_sentence.txt"));
  while (!sentence.empty() && sentence.back() == '\n') sentence.pop_back();
  CHECK(tokenize(sentence, base).tokens == lines_of(fixture("golden_before.txt")));
  CHECK(tokenize(sentence, enriched).tokens == lines_of(fixture("golden_after.txt")));
}

TEST_CASE("tokenization fields") {
  const Vocabulary base = load_vocab(fixture("golden_base_vocab.txt"));
  const auto t = tokenize("Toshiba issued", base);
  CHECK(t.word_index == std::vector<int>{kNoWord, 0, 0, 0, 1, kNoWord});
  CHECK(t.char_offsets ==
        std::vector<std::pair<int, int>>{{0, 0}, {0, 2}, {2, 5}, {5, 7}, {8, 14}, {0, 0}});
  CHECK(t.is_continuation(2));
  CHECK(t.is_continuation(3));
  CHECK_FALSE(t.is_continuation(1));
  CHECK_FALSE(t.is_continuation(4));
  CHECK(t.ids.front() == base.cls_id());
  CHECK(t.ids.back() == base.sep_id());
  for (std::size_t i = 0; i < t.size(); ++i) CHECK(base.token(t.ids[i]) == t.tokens[i]);
}

TEST_CASE("added tokens split inside a word without the prefix") {
  const Vocabulary v = toy({"X", "##R", "A", "##2"}).with_added({"XR", "A2"});
  CHECK(content(tokenize("XRA2", v)) == std::vector<std::string>{"XR", "A2"});
  CHECK(content(tokenize("XRA", v)) == std::vector<std::string>{"XR", "A"});
  // an unmatchable fragment turns the whole word into [UNK]
  CHECK(content(tokenize("XRq", v)) == std::vector<std::string>{"[UNK]"});
}

TEST_CASE("long words and truncation") {
  const Vocabulary v = toy({"a", "##a"});
  CHECK(content(tokenize(std::string(100, 'a'), v)).size() == 100);
  CHECK(content(tokenize(std::string(101, 'a'), v)) == std::vector<std::string>{"[UNK]"});

  const std::string text = "a a a a a a a a a a";
  for (int max_len = 2; max_len < 15; ++max_len) {
    const auto t = tokenize(text, v, max_len);
    CHECK(t.size() == static_cast<std::size_t>(std::min(max_len, 12)));
    CHECK(t.tokens.front() == "[CLS]");
    CHECK(t.tokens.back() == "[SEP]");
  }
  CHECK_THROWS_AS(tokenize(text, v, 1), std::invalid_argument);
}

TEST_CASE("greedy segmentation agrees with the brute-force oracle") {
  std::mt19937_64 rng(99);
  const std::u32string alphabet = U"abcé";
  for (int trial = 0; trial < 300; ++trial) {
    std::set<std::string> pieces;
    const std::size_t n = 1 + rng() % 12;
    for (std::size_t i = 0; i < n; ++i) {
      std::u32string p;
      const std::size_t len = 1 + rng() % 3;
      for (std::size_t j = 0; j < len; ++j) p.push_back(alphabet[rng() % alphabet.size()]);
      pieces.insert((rng() % 2 ? "##" : "") + text::encode_utf8(p));
    }
    const Vocabulary v = toy({pieces.begin(), pieces.end()});
    for (int w = 0; w < 10; ++w) {
      std::u32string word;
      const std::size_t len = 1 + rng() % 6;
      for (std::size_t j = 0; j < len; ++j) word.push_back(alphabet[rng() % alphabet.size()]);
      const auto got = content(tokenize(text::encode_utf8(word), v));
      CHECK(got == oracle_wordpiece(word, pieces));
      if (got != std::vector<std::string>{"[UNK]"}) {
        std::string joined;
        for (const auto& g : got) joined += g.rfind("##", 0) == 0 ? g.substr(2) : g;
        CHECK(joined == text::encode_utf8(word));
      }
    }
  }
}

TEST_CASE("whole-word guarantee and determinism") {
  const Vocabulary base = load_vocab(fixture("golden_base_vocab.txt"));
  for (const std::string w : {"Defibrillator", "Zx9", "Modification", "caf\xC3\xA9"}) {
    const Vocabulary v = base.with_added({w});
    const auto t = tokenize("the " + w + " was", v);
    CHECK(content(t) == std::vector<std::string>{"the", w, "was"});
    CHECK(tokenize("the " + w + " was", v).ids == t.ids);
  }
}

TEST_CASE("enrich") {
  const Vocabulary base = toy({"a", "##b"});
  const std::vector<std::string> cands = {"Pump", "Stent", "a", "Catheter"};

  const Vocabulary all = enrich(base, cands, 1.0, OrderStrategy::kFifo, 0);
  CHECK(all.size() == base.size() + 3);
  CHECK(all.find("Pump") == base.size());
  for (int i = 0; i < base.size(); ++i) CHECK(all.token(i) == base.token(i));

  CHECK(enrich(base, cands, 0.0, OrderStrategy::kShuffle, 1) == base);
  CHECK(enrich(base, {"a", "##b", "[UNK]"}, 1.0, OrderStrategy::kShuffle, 1).size() == base.size());
  CHECK(enrich(base, cands, 0.5, OrderStrategy::kFifo, 0).size() == base.size() + 2);
  CHECK(enrich(base, cands, 0.25, OrderStrategy::kLengthDesc, 0).find("Catheter") == base.size());
  CHECK(enrich(base, cands, 0.5, OrderStrategy::kShuffle, 4) ==
        enrich(base, cands, 0.5, OrderStrategy::kShuffle, 4));
  CHECK_THROWS_AS(enrich(base, cands, 1.5, OrderStrategy::kFifo, 0), std::invalid_argument);
}

TEST_CASE("tokenization_diff") {
  const Vocabulary base = load_vocab(fixture("golden_base_vocab.txt"));
  const Vocabulary enriched = load_vocab(fixture("golden_enriched_vocab.txt"));
  std::string sentence = read_file(fixture("golden_sentence.txt"));

  const auto d = tokenization_diff({sentence}, base, enriched);
  REQUIRE(d.documents.size() == 1);
  CHECK(d.total_b.continuation < d.total_a.continuation);
  CHECK(d.total_a == d.documents[0].first);

  const auto same = tokenization_diff({sentence, "Toshiba"}, base, base);
  for (const auto& [a, b] : same.documents) CHECK(a == b);
  CHECK(same.total_a == same.total_b);

  const auto one = tokenization_diff({"Toshiba"}, base, base.with_added({"Toshiba"}));
  CHECK(one.total_a.total == 3);
  CHECK(one.total_b.total == 1);
  CHECK(one.total_b.continuation == 0);

  const auto j = d.to_json();
  CHECK(j.contains("documents"));
  CHECK(j.contains("aggregate"));
}
