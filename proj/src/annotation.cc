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

#include "recallner/annotation.h"

#include <algorithm>
#include <numeric>

#include "recallner/digest.h"
#include "recallner/text.h"

namespace recallner {

using nlohmann::json;

std::string_view tag_name(EntityTag tag) {
  switch (tag) {
    case EntityTag::kBegin:
      return "B-DEVICE";
    case EntityTag::kInside:
      return "I-DEVICE";
    case EntityTag::kOutsideDevice:
      return "O-DEVICE";
  }
  return "";
}

std::optional<EntityTag> parse_tag(std::string_view name) {
  if (name == "B-DEVICE") return EntityTag::kBegin;
  if (name == "I-DEVICE") return EntityTag::kInside;
  if (name == "O-DEVICE") return EntityTag::kOutsideDevice;
  return std::nullopt;
}

LabelScheme::LabelScheme()
    : labels_{"O", "B-DEVICE", "I-DEVICE", "O-DEVICE"} {}

const LabelScheme& LabelScheme::standard() {
  static const LabelScheme scheme;
  return scheme;
}

int LabelScheme::id(EntityTag tag) const {
  return *id(tag_name(tag));
}

std::optional<int> LabelScheme::id(std::string_view label) const {
  for (int i = 0; i < kNumLabels; ++i) {
    if (labels_[static_cast<std::size_t>(i)] == label) return i;
  }
  return std::nullopt;
}

const std::string& LabelScheme::label(int id) const {
  if (!valid(id)) {
    throw std::out_of_range("label id out of range: " + std::to_string(id));
  }
  return labels_[static_cast<std::size_t>(id)];
}

namespace {

std::string where(std::size_t line_no) {
  return "annotation line " + std::to_string(line_no) + ": ";
}

std::string doc_id_of(const json& obj, std::size_t line_no) {
  for (const char* key : {"id", "doc_id", "cfres_id"}) {
    auto it = obj.find(key);
    if (it == obj.end() || it->is_null()) continue;
    return it->is_string() ? it->get<std::string>() : it->dump();
  }
  return "line-" + std::to_string(line_no);
}

// Trimmed [start, end) of a span: punctuation and whitespace removed from
// both ends. start == end when nothing is left.
std::pair<int, int> trimmed(const std::u32string& text,
                            const AnnotationSpan& span) {
  int start = span.start;
  int end = span.end;
  auto skip = [&text](int i) {
    char32_t c = text[static_cast<std::size_t>(i)];
    return text::is_punctuation(c) || text::is_whitespace(c);
  };
  while (start < end && skip(start)) ++start;
  while (end > start && skip(end - 1)) --end;
  return {start, end};
}

std::vector<std::size_t> order_by_start(const std::vector<AnnotationSpan>& s) {
  std::vector<std::size_t> order(s.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&s](auto a, auto b) {
    return std::tie(s[a].start, s[a].end) < std::tie(s[b].start, s[b].end);
  });
  return order;
}

}  // namespace

AnnotatedDoc parse_annotation_line(std::string_view line, std::size_t line_no) {
  json obj = json::parse(line, nullptr, /*allow_exceptions=*/false);
  if (obj.is_discarded() || !obj.is_object()) {
    throw AnnotationError(where(line_no) + "malformed JSON");
  }
  auto text_it = obj.find("text");
  if (text_it == obj.end() || !text_it->is_string()) {
    throw AnnotationError(where(line_no) + "missing text");
  }
  AnnotatedDoc doc;
  doc.doc_id = doc_id_of(obj, line_no);
  doc.text = text_it->get<std::string>();
  const int length = static_cast<int>(text::length(doc.text));

  auto label_it = obj.find("label");
  if (label_it == obj.end() || label_it->is_null()) return doc;
  if (!label_it->is_array()) {
    throw AnnotationError(where(line_no) + "label must be an array");
  }
  for (const json& entry : *label_it) {
    if (!entry.is_array() || entry.size() != 3 || !entry[0].is_number_integer() ||
        !entry[1].is_number_integer() || !entry[2].is_string()) {
      throw AnnotationError(where(line_no) +
                            "label entries must be [start, end, tag]");
    }
    AnnotationSpan span;
    span.start = entry[0].get<int>();
    span.end = entry[1].get<int>();
    auto tag = parse_tag(entry[2].get<std::string>());
    if (!tag) {
      throw AnnotationError(where(line_no) + "unknown tag " +
                            entry[2].get<std::string>());
    }
    span.tag = *tag;
    if (span.start < 0 || span.start >= span.end || span.end > length) {
      throw AnnotationError(where(line_no) + "span [" +
                            std::to_string(span.start) + ", " +
                            std::to_string(span.end) +
                            ") out of bounds for text of length " +
                            std::to_string(length));
    }
    doc.spans.push_back(span);
  }
  auto order = order_by_start(doc.spans);
  for (std::size_t i = 1; i < order.size(); ++i) {
    if (doc.spans[order[i]].start < doc.spans[order[i - 1]].end) {
      throw AnnotationError(where(line_no) + "overlapping spans");
    }
  }
  return doc;
}

std::vector<AnnotatedDoc> parse_annotations_text(std::string_view jsonl) {
  std::vector<AnnotatedDoc> docs;
  std::size_t pos = 0;
  std::size_t line_no = 0;
  while (pos < jsonl.size()) {
    std::size_t end = jsonl.find('\n', pos);
    if (end == std::string_view::npos) end = jsonl.size();
    std::string_view line = jsonl.substr(pos, end - pos);
    pos = end + 1;
    ++line_no;
    if (line.find_first_not_of(" \t\r") == std::string_view::npos) continue;
    docs.push_back(parse_annotation_line(line, line_no));
  }
  return docs;
}

std::vector<AnnotatedDoc> parse_annotations(const std::string& path) {
  return parse_annotations_text(read_file(path));
}

std::string serialize_annotations(const std::vector<AnnotatedDoc>& docs) {
  std::string out;
  for (const auto& doc : docs) {
    json labels = json::array();
    for (const auto& s : doc.spans) {
      labels.push_back({s.start, s.end, std::string(tag_name(s.tag))});
    }
    out += json{{"id", doc.doc_id}, {"text", doc.text}, {"label", labels}}.dump();
    out += '\n';
  }
  return out;
}

std::vector<RuleWarning> validate_annotation_rules(const AnnotatedDoc& doc) {
  std::vector<RuleWarning> warnings;
  const std::u32string text = text::decode_utf8(doc.text);
  auto order = order_by_start(doc.spans);

  bool have_region = false;
  bool region_has_begin = false;
  int region_end = 0;
  for (std::size_t idx : order) {
    const AnnotationSpan& span = doc.spans[idx];
    auto [start, end] = trimmed(text, span);
    if (start == end) {
      warnings.push_back({idx, RuleKind::kEmptyAfterTrim,
                          "span is empty once special characters are trimmed"});
      continue;
    }
    if (text::is_punctuation(text[static_cast<std::size_t>(span.start)]) ||
        text::is_punctuation(text[static_cast<std::size_t>(span.end - 1)])) {
      warnings.push_back({idx, RuleKind::kSpecialCharacterBoundary,
                          "span boundary falls on a special character"});
    }

    // A span continues the current region when only whitespace and
    // punctuation separate it from the previous span.
    bool contiguous = have_region;
    for (int i = region_end; contiguous && i < start; ++i) {
      char32_t c = text[static_cast<std::size_t>(i)];
      if (!text::is_whitespace(c) && !text::is_punctuation(c)) contiguous = false;
    }
    if (span.tag == EntityTag::kBegin) {
      region_has_begin = true;
    } else {
      if (!contiguous) region_has_begin = false;
      if (!region_has_begin) {
        warnings.push_back({idx, RuleKind::kOrphanContinuation,
                            std::string(tag_name(span.tag)) +
                                " span without a preceding B-DEVICE"});
      }
    }
    have_region = true;
    region_end = end;
  }
  std::sort(warnings.begin(), warnings.end(),
            [](const RuleWarning& a, const RuleWarning& b) {
              return a.span_index < b.span_index;
            });
  return warnings;
}

std::vector<int> word_labels(const AnnotatedDoc& doc,
                             const std::vector<Word>& words,
                             const LabelScheme& scheme) {
  std::vector<int> labels(words.size(), scheme.outside_id());
  std::vector<bool> assigned(words.size(), false);
  const std::u32string text = text::decode_utf8(doc.text);
  for (std::size_t idx : order_by_start(doc.spans)) {
    const AnnotationSpan& span = doc.spans[idx];
    auto [start, end] = trimmed(text, span);
    if (start == end) continue;
    bool first = true;
    for (std::size_t w = 0; w < words.size(); ++w) {
      if (words[w].end <= start || words[w].start >= end) continue;
      if (assigned[w]) {
        first = false;
        continue;
      }
      EntityTag tag = span.tag;
      if (!first && tag == EntityTag::kBegin) tag = EntityTag::kInside;
      labels[w] = scheme.id(tag);
      assigned[w] = true;
      first = false;
    }
  }
  return labels;
}

AlignedExample align(const AnnotatedDoc& doc, const Tokenization& tokenization,
                     const LabelScheme& scheme) {
  const std::vector<Word> words = pre_split(doc.text);
  const std::vector<int> per_word = word_labels(doc, words, scheme);

  AlignedExample out;
  out.doc_id = doc.doc_id;
  out.ids = tokenization.ids;
  out.labels.reserve(tokenization.size());
  out.attention_mask.assign(tokenization.size(), 1);
  for (std::size_t i = 0; i < tokenization.size(); ++i) {
    if (tokenization.is_special(i)) {
      out.labels.push_back(LabelScheme::kIgnore);
      continue;
    }
    const int w = tokenization.word_index[i];
    const auto [begin, end] = tokenization.char_offsets[i];
    if (w < 0 || static_cast<std::size_t>(w) >= words.size() ||
        begin < words[static_cast<std::size_t>(w)].start ||
        end > words[static_cast<std::size_t>(w)].end || begin >= end) {
      throw AnnotationError("tokenization does not match text of document " +
                            doc.doc_id + " at token " + std::to_string(i));
    }
    out.labels.push_back(tokenization.is_continuation(i)
                             ? LabelScheme::kIgnore
                             : per_word[static_cast<std::size_t>(w)]);
  }
  return out;
}

std::vector<int> first_piece_labels(const std::vector<int>& labels) {
  std::vector<int> out;
  for (int l : labels) {
    if (l != LabelScheme::kIgnore) out.push_back(l);
  }
  return out;
}

json to_json(const AlignedExample& example) {
  return {{"doc_id", example.doc_id},
          {"ids", example.ids},
          {"labels", example.labels},
          {"attention_mask", example.attention_mask}};
}

AlignedExample aligned_from_json(const json& obj) {
  AlignedExample ex;
  ex.doc_id = obj.at("doc_id").get<std::string>();
  ex.ids = obj.at("ids").get<std::vector<int>>();
  ex.labels = obj.at("labels").get<std::vector<int>>();
  ex.attention_mask = obj.at("attention_mask").get<std::vector<int>>();
  if (ex.labels.size() != ex.ids.size() ||
      ex.attention_mask.size() != ex.ids.size()) {
    throw AnnotationError("aligned example " + ex.doc_id +
                          ": field lengths differ");
  }
  return ex;
}

void save_aligned(const std::vector<AlignedExample>& examples,
                  const std::string& path) {
  std::string out;
  for (const auto& ex : examples) {
    out += to_json(ex).dump();
    out += '\n';
  }
  write_file(path, out);
}

std::vector<AlignedExample> load_aligned(const std::string& path) {
  std::vector<AlignedExample> out;
  for (const auto& line : text::read_lines(path)) {
    if (line.empty()) continue;
    out.push_back(aligned_from_json(json::parse(line)));
  }
  return out;
}

}  // namespace recallner
