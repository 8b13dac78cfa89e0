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

#include "recallner/inference.h"

#include <algorithm>
#include <stdexcept>

#include "recallner/annotation.h"
#include "recallner/wordpiece.h"

namespace recallner {

std::vector<TokenPrediction> predict(const Parameters& params,
                                     const Vocabulary& vocab,
                                     std::string_view text) {
  if (text.empty()) throw std::invalid_argument("cannot predict on empty text");
  if (vocab.size() != params.config.vocab_size) {
    throw ModelError("vocabulary has " + std::to_string(vocab.size()) +
                     " tokens but the model expects " +
                     std::to_string(params.config.vocab_size));
  }
  const int max_len = std::min(kDefaultMaxLen, params.config.max_positions);
  Tokenization tok = tokenize(text, vocab, max_len);

  Batch batch;
  batch.rows = 1;
  batch.cols = tok.size();
  batch.ids = tok.ids;
  batch.labels.assign(tok.size(), LabelScheme::kIgnore);
  batch.attention_mask.assign(tok.size(), 1);
  batch.lengths = {tok.size()};
  Matrix probs = softmax_rows(forward(params, batch, ForwardMode::eval()).logits);

  const LabelScheme& scheme = LabelScheme::standard();
  std::vector<TokenPrediction> out;
  for (std::size_t i = 0; i < tok.size(); ++i) {
    if (tok.is_special(i)) continue;
    Eigen::Index arg = 0;
    const double confidence = probs.row(static_cast<Eigen::Index>(i)).maxCoeff(&arg);
    out.push_back({tok.tokens[i], scheme.label(static_cast<int>(arg)), confidence,
                   static_cast<int>(i)});
  }
  return out;
}

std::vector<TokenPrediction> filter_predictions(
    const std::vector<TokenPrediction>& preds, double threshold) {
  if (!(threshold >= 0.0 && threshold <= 1.0)) {
    throw std::invalid_argument("threshold must be in [0, 1]");
  }
  std::vector<TokenPrediction> kept;
  for (const auto& p : preds) {
    if (p.confidence >= threshold && p.label != "O") kept.push_back(p);
  }
  return kept;
}

std::string format_report_line(const TokenPrediction& pred) {
  return "Token: " + pred.token + " - Label: " + pred.label;
}

std::vector<std::string> threshold_report(
    const std::vector<TokenPrediction>& preds, double threshold) {
  std::vector<std::string> lines;
  for (const auto& p : filter_predictions(preds, threshold)) {
    lines.push_back(format_report_line(p));
  }
  return lines;
}

nlohmann::json report_json(const std::vector<TokenPrediction>& kept,
                           double threshold) {
  nlohmann::json tokens = nlohmann::json::array();
  for (const auto& p : kept) {
    tokens.push_back({{"token", p.token},
                      {"label", p.label},
                      {"confidence", p.confidence},
                      {"position", p.position}});
  }
  return {{"threshold", threshold}, {"predictions", tokens}};
}

}  // namespace recallner
