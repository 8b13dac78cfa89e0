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

#ifndef RECALLNER_ANNOTATION_H_
#define RECALLNER_ANNOTATION_H_

#include <array>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "json.hpp"
#include "recallner/wordpiece.h"

namespace recallner {

class AnnotationError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// The three span tags an annotator can apply. Unlabelled text is "O".
enum class EntityTag { kBegin, kInside, kOutsideDevice };

std::string_view tag_name(EntityTag tag);
std::optional<EntityTag> parse_tag(std::string_view name);

// Label <-> id mapping used for training. The ignore id never appears in the
// bijection.
class LabelScheme {
 public:
  static constexpr int kIgnore = -100;
  static constexpr int kNumLabels = 4;

  static const LabelScheme& standard();

  int outside_id() const { return 0; }
  int id(EntityTag tag) const;
  std::optional<int> id(std::string_view label) const;
  const std::string& label(int id) const;
  bool valid(int id) const { return id >= 0 && id < kNumLabels; }
  const std::array<std::string, kNumLabels>& labels() const { return labels_; }

 private:
  LabelScheme();
  std::array<std::string, kNumLabels> labels_;
};

struct AnnotationSpan {
  int start = 0;  // code points, inclusive
  int end = 0;    // code points, exclusive
  EntityTag tag = EntityTag::kBegin;

  bool operator==(const AnnotationSpan&) const = default;
};

struct AnnotatedDoc {
  std::string doc_id;
  std::string text;
  std::vector<AnnotationSpan> spans;
};

// One doccano export line: {"text": ..., "label": [[start, end, tag], ...]}.
// The document id is taken from "id", "doc_id" or "cfres_id", falling back to
// "line-<n>".
AnnotatedDoc parse_annotation_line(std::string_view line, std::size_t line_no);
std::vector<AnnotatedDoc> parse_annotations(const std::string& path);
std::vector<AnnotatedDoc> parse_annotations_text(std::string_view jsonl);
std::string serialize_annotations(const std::vector<AnnotatedDoc>& docs);

enum class RuleKind {
  kOrphanContinuation,        // I-/O-DEVICE without a B-DEVICE in its region
  kSpecialCharacterBoundary,  // span starts or ends on a special character
  kEmptyAfterTrim,            // nothing left once punctuation is trimmed
};

struct RuleWarning {
  std::size_t span_index = 0;  // index into doc.spans
  RuleKind kind = RuleKind::kOrphanContinuation;
  std::string message;
};

std::vector<RuleWarning> validate_annotation_rules(const AnnotatedDoc& doc);

struct AlignedExample {
  std::string doc_id;
  std::vector<int> ids;
  std::vector<int> labels;
  std::vector<int> attention_mask;

  std::size_t size() const { return ids.size(); }
  bool operator==(const AlignedExample&) const = default;
};

// Word-level label ids induced by the spans. The first word a span touches
// gets the span's label; later words of a B-/I-DEVICE span get I-DEVICE and
// later words of an O-DEVICE span keep O-DEVICE. Untouched words are O.
std::vector<int> word_labels(const AnnotatedDoc& doc,
                             const std::vector<Word>& words,
                             const LabelScheme& scheme);

// First piece of each word carries the word label; continuation pieces and
// specials get the ignore id. Throws AnnotationError when the tokenization
// does not belong to doc.text.
AlignedExample align(const AnnotatedDoc& doc, const Tokenization& tokenization,
                     const LabelScheme& scheme);

// Labels at non-ignored positions, in order.
std::vector<int> first_piece_labels(const std::vector<int>& labels);

nlohmann::json to_json(const AlignedExample& example);
AlignedExample aligned_from_json(const nlohmann::json& obj);
void save_aligned(const std::vector<AlignedExample>& examples,
                  const std::string& path);
std::vector<AlignedExample> load_aligned(const std::string& path);

}  // namespace recallner

#endif  // RECALLNER_ANNOTATION_H_
