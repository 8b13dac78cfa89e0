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


#include <algorithm>
#include <random>

#include "doctest.h"
#include "recallner/annotation.h"
#include "recallner/text.h"
#include "recallner/vocab.h"
#include "recallner/wordpiece.h"
#include "test_util.h"

using namespace recallner;

namespace {

const LabelScheme& scheme = LabelScheme::standard();
constexpr int kIgn = LabelScheme::kIgnore;

std::string slice(const std::string& utf8, int start, int end) {
  return text::encode_utf8(text::decode_utf8(utf8).substr(start, end - start));
}

AnnotatedDoc doc_of(std::string text, std::vector<AnnotationSpan> spans) {
  return {"d", std::move(text), std::move(spans)};
}

std::size_t count_kind(const std::vector<RuleWarning>& ws, RuleKind kind) {
  return std::count_if(ws.begin(), ws.end(), [kind](const auto& w) { return w.kind == kind; });
}

// Random document over a small alphabet with word-aligned spans.
AnnotatedDoc random_doc(std::mt19937_64& rng) {
  static const std::vector<std::string> lexicon = {"ab", "ba", "abc", "c", "-", "(", "cab", "bb"};
  std::vector<std::pair<int, int>> word_spans;
  std::string text;
  const std::size_t n = 1 + rng() % 10;
  for (std::size_t i = 0; i < n; ++i) {
    if (i > 0) text += ' ';
    const std::string& w = lexicon[rng() % lexicon.size()];
    word_spans.emplace_back(static_cast<int>(text.size()), static_cast<int>(text.size() + w.size()));
    text += w;
  }
  std::vector<AnnotationSpan> spans;
  std::size_t i = 0;
  while (i < n) {
    if (rng() % 2) {
      const std::size_t len = 1 + rng() % std::min<std::size_t>(3, n - i);
      const auto tag = static_cast<EntityTag>(rng() % 3);
      spans.push_back({word_spans[i].first, word_spans[i + len - 1].second, tag});
      i += len;
    } else {
      ++i;
    }
  }
  return doc_of(text, spans);
}

Vocabulary random_vocab(std::mt19937_64& rng) {
  std::vector<std::string> tokens = {"[PAD]", "[UNK]", "[CLS]", "[SEP]", "-", "("};
  for (const std::string p : {"a", "b", "c", "ab", "ba", "abc", "##a", "##b", "##c", "##bc", "cab"}) {
    if (rng() % 2) tokens.push_back(p);
  }
  return Vocabulary::from_tokens(tokens);
}

}  // namespace

TEST_CASE("label scheme") {
  CHECK(scheme.id(EntityTag::kBegin) == 1);
  CHECK(scheme.id(EntityTag::kInside) == 2);
  CHECK(scheme.id(EntityTag::kOutsideDevice) == 3);
  CHECK(scheme.outside_id() == 0);
  for (int i = 0; i < LabelScheme::kNumLabels; ++i) CHECK(scheme.id(scheme.label(i)) == i);
  CHECK_FALSE(scheme.valid(kIgn));
  CHECK_FALSE(scheme.id("B-DRUG").has_value());
  CHECK_THROWS_AS(scheme.label(kIgn), std::out_of_range);
  CHECK(parse_tag("O-DEVICE") == EntityTag::kOutsideDevice);
  CHECK_FALSE(parse_tag("O").has_value());
}

TEST_CASE("parse_annotations examples") {
  auto empty = parse_annotation_line(R"({"text":"nothing here","label":[]})", 1);
  CHECK(empty.spans.empty());
  CHECK(empty.doc_id == "line-1");

  auto one = parse_annotation_line(R"({"id":7,"text":"Toshiba issued a notice","label":[[0,7,"B-DEVICE"]]})", 1);
  REQUIRE(one.spans.size() == 1);
  CHECK(one.doc_id == "7");
  CHECK(slice(one.text, one.spans[0].start, one.spans[0].end) == "Toshiba");

  CHECK_THROWS_AS(parse_annotation_line(R"({"text":"abc","label":[[0,1,"B-DRUG"]]})", 1), AnnotationError);
  CHECK_THROWS_AS(parse_annotation_line(R"({"text":"abc","label":[[0,4,"B-DEVICE"]]})", 1), AnnotationError);
  CHECK_THROWS_AS(parse_annotation_line(R"({"text":"abc","label":[[2,2,"B-DEVICE"]]})", 1), AnnotationError);
  CHECK_THROWS_AS(parse_annotation_line(R"({"text":"abcd","label":[[0,2,"B-DEVICE"],[1,3,"I-DEVICE"]]})", 1), AnnotationError);
  CHECK_THROWS_AS(parse_annotation_line("{not json", 1), AnnotationError);
  CHECK_THROWS_AS(parse_annotation_line(R"({"label":[]})", 1), AnnotationError);
}

TEST_CASE("offsets count code points") {
  const auto docs = parse_annotations(fixture("doccano_sample.jsonl"));
  REQUIRE(docs.size() == 4);
  CHECK(docs[0].doc_id == "180001");
  CHECK(docs[3].spans.empty());
  const auto& d = docs[2];
  CHECK(slice(d.text, d.spans[4].start, d.spans[4].end) == "Resp\xC3\xADraMax");
  CHECK(parse_annotations_text(serialize_annotations(docs)).size() == 4);
  const auto back = parse_annotations_text(serialize_annotations(docs));
  for (std::size_t i = 0; i < docs.size(); ++i) {
    CHECK(back[i].spans == docs[i].spans);
    CHECK(back[i].text == docs[i].text);
    CHECK(back[i].doc_id == docs[i].doc_id);
  }
}

TEST_CASE("validate_annotation_rules examples") {
  using T = EntityTag;
  const auto orphan = validate_annotation_rules(doc_of("the Pump works", {{4, 8, T::kInside}}));
  CHECK(orphan.size() == 1);
  CHECK(count_kind(orphan, RuleKind::kOrphanContinuation) == 1);

  CHECK(validate_annotation_rules(
            doc_of("VitaFlow Pump", {{0, 8, T::kBegin}, {9, 13, T::kInside}})).empty());

  const auto paren = validate_annotation_rules(doc_of("a (Pump) b", {{2, 7, T::kBegin}}));
  CHECK(paren.size() == 1);
  CHECK(count_kind(paren, RuleKind::kSpecialCharacterBoundary) == 1);

  const auto empty = validate_annotation_rules(doc_of("a -- b", {{2, 4, T::kBegin}}));
  CHECK(count_kind(empty, RuleKind::kEmptyAfterTrim) == 1);

  // a B span does not license an I span in a later, separate region
  const auto far = validate_annotation_rules(
      doc_of("Pump and then Stent", {{0, 4, T::kBegin}, {14, 19, T::kInside}}));
  CHECK(count_kind(far, RuleKind::kOrphanContinuation) == 1);
  CHECK(far[0].span_index == 1);

  for (const auto& doc : parse_annotations(fixture("doccano_sample.jsonl"))) {
    CHECK(validate_annotation_rules(doc).empty());
  }
}

TEST_CASE("word labels follow the spans") {
  const auto docs = parse_annotations(fixture("doccano_sample.jsonl"));
  const auto& d = docs[2];
  const auto words = pre_split(d.text);
  const auto labels = word_labels(d, words, scheme);
  // Replace the exhalation valve of the RespíraMax Ventilator .
  CHECK(labels == std::vector<int>{0, 0, 1, 2, 3, 3, 1, 2, 0});

  const auto multi = doc_of("Vita Flow Pump x", {{0, 14, EntityTag::kBegin}});
  CHECK(word_labels(multi, pre_split(multi.text), scheme) == std::vector<int>{1, 2, 2, 0});
  const auto od = doc_of("of the x", {{0, 6, EntityTag::kOutsideDevice}});
  CHECK(word_labels(od, pre_split(od.text), scheme) == std::vector<int>{3, 3, 0});
}

TEST_CASE("align examples") {
  const Vocabulary base = load_vocab(fixture("golden_base_vocab.txt"));
  const auto plain = doc_of("Toshiba issued", {});
  const auto a = align(plain, tokenize(plain.text, base), scheme);
  CHECK(a.labels == std::vector<int>{kIgn, 0, kIgn, kIgn, 0, kIgn});
  CHECK(a.attention_mask == std::vector<int>(6, 1));

  const auto dev = doc_of("Toshiba issued", {{0, 7, EntityTag::kBegin}});
  const auto b = align(dev, tokenize(dev.text, base), scheme);
  CHECK(b.labels == std::vector<int>{kIgn, 1, kIgn, kIgn, 0, kIgn});

  const auto other = doc_of("Hi", {});
  CHECK_THROWS_AS(align(other, tokenize("Toshiba issued", base), scheme), AnnotationError);
}

TEST_CASE("align properties over random docs and vocabularies") {
  std::mt19937_64 rng(2024);
  for (int trial = 0; trial < 300; ++trial) {
    const AnnotatedDoc doc = random_doc(rng);
    const Vocabulary vocab = random_vocab(rng);
    const Tokenization tok = tokenize(doc.text, vocab);
    const AlignedExample ex = align(doc, tok, scheme);

    REQUIRE(ex.labels.size() == ex.ids.size());
    CHECK(ex.attention_mask.size() == ex.ids.size());
    for (std::size_t i = 0; i < ex.size(); ++i) {
      const bool masked = tok.is_special(i) || tok.is_continuation(i);
      CHECK((ex.labels[i] == kIgn) == masked);
      if (!masked) CHECK(scheme.valid(ex.labels[i]));
    }

    CHECK(first_piece_labels(ex.labels) == word_labels(doc, pre_split(doc.text), scheme));

    AnnotatedDoc shuffled = doc;
    std::shuffle(shuffled.spans.begin(), shuffled.spans.end(), rng);
    CHECK(align(shuffled, tok, scheme) == ex);

    CHECK(aligned_from_json(to_json(ex)) == ex);
  }
}

TEST_CASE("aligned file round trip") {
  TempDir tmp("aligned");
  const Vocabulary base = load_vocab(fixture("golden_base_vocab.txt"));
  std::vector<AlignedExample> all;
  for (const auto& d : parse_annotations(fixture("doccano_sample.jsonl"))) {
    all.push_back(align(d, tokenize(d.text, base), scheme));
  }
  save_aligned(all, tmp.file("a.jsonl"));
  CHECK(load_aligned(tmp.file("a.jsonl")) == all);
  CHECK_THROWS_AS(aligned_from_json({{"doc_id", "x"}, {"ids", {1, 2}}, {"labels", {0}},
                                     {"attention_mask", {1, 1}}}),
                  AnnotationError);
}
