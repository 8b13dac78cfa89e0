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

#ifndef RECALLNER_INFERENCE_H_
#define RECALLNER_INFERENCE_H_

#include <string>
#include <string_view>
#include <vector>

#include "json.hpp"
#include "recallner/model.h"
#include "recallner/vocab.h"

namespace recallner {

inline constexpr double kDefaultThreshold = 0.99;

struct TokenPrediction {
  std::string token;
  std::string label;
  double confidence = 0.0;  // max of the softmax row
  int position = 0;         // index in the tokenization, [CLS] = 0
};

// tokenize -> eval forward -> per-token softmax; [CLS]/[SEP] are dropped.
std::vector<TokenPrediction> predict(const Parameters& params,
                                     const Vocabulary& vocab,
                                     std::string_view text);

// Predictions with confidence >= threshold and a label other than O, in
// input order. threshold must lie in [0, 1].
std::vector<TokenPrediction> filter_predictions(
    const std::vector<TokenPrediction>& preds, double threshold);

// "Token: <token> - Label: <label>" for each kept prediction.
std::vector<std::string> threshold_report(
    const std::vector<TokenPrediction>& preds,
    double threshold = kDefaultThreshold);

std::string format_report_line(const TokenPrediction& pred);

nlohmann::json report_json(const std::vector<TokenPrediction>& kept,
                           double threshold);

}  // namespace recallner

#endif  // RECALLNER_INFERENCE_H_
