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

#ifndef RECALLNER_EVALUATION_H_
#define RECALLNER_EVALUATION_H_

#include <string>
#include <utility>
#include <vector>

#include "json.hpp"

namespace recallner {

struct EntitySpan {
  int start_token = 0;
  int end_token = 0;  // exclusive
  std::string doc_id;

  auto operator<=>(const EntitySpan&) const = default;
};

struct MetricsReport {
  std::size_t tp = 0;
  std::size_t fp = 0;
  std::size_t fn = 0;
  double precision = 0.0;  // percent
  double recall = 0.0;     // percent
  double f1 = 0.0;         // percent
  std::vector<MetricsReport> per_fold;
  bool averaged = false;

  nlohmann::json to_json() const;
};

// Lenient BIO decoding over word-level label ids (O=0, B=1, I=2, O-DEVICE=3).
// B opens a span, I and O-DEVICE extend it (or open one when none is open),
// O closes it.
std::vector<EntitySpan> extract_entities(const std::vector<int>& labels,
                                         const std::string& doc_id = "");

// Exact-match span scoring.
MetricsReport prf1(const std::vector<EntitySpan>& pred,
                   const std::vector<EntitySpan>& gold);

MetricsReport metrics_from_counts(std::size_t tp, std::size_t fp,
                                  std::size_t fn);

// Macro average of per-fold P/R/F1; counts are summed. Throws on empty input.
MetricsReport average_folds(const std::vector<MetricsReport>& reports);

struct LabelSequence {
  std::string doc_id;
  std::vector<int> labels;
};

// Scores aligned gold/pred documents (matched by position; doc ids and
// lengths must agree).
MetricsReport score_documents(const std::vector<LabelSequence>& gold,
                              const std::vector<LabelSequence>& pred);

// JSONL {"doc_id", "labels"}; labels may be ids or label names and ignore
// entries (-100) are dropped.
std::vector<LabelSequence> load_label_sequences(const std::string& path);
void save_label_sequences(const std::vector<LabelSequence>& seqs,
                          const std::string& path);

// Fixed-width "Model | Precision (%) | Recall (%) | F1 Score (%)" table.
std::string format_table(
    const std::vector<std::pair<std::string, MetricsReport>>& rows);

}  // namespace recallner

#endif  // RECALLNER_EVALUATION_H_
