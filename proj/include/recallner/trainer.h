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

#ifndef RECALLNER_TRAINER_H_
#define RECALLNER_TRAINER_H_

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "recallner/adamw.h"
#include "recallner/annotation.h"
#include "recallner/dataset.h"
#include "recallner/evaluation.h"
#include "recallner/model.h"

namespace recallner {

struct TrainConfig {
  ModelConfig model;
  HyperParams hyper;
  int epochs = 10;
  std::size_t batch_size = 16;
  std::size_t k = 5;
  // false: a single seeded train/test split instead of K folds.
  bool use_kfold = true;
  double test_fraction = 0.2;
  uint64_t seed = 0;

  void validate() const;
};

nlohmann::json to_json(const TrainConfig& config);
// Missing fields keep their defaults; "model" and "hyper" are nested objects.
TrainConfig train_config_from_json(const nlohmann::json& obj);

struct EpochStats {
  int epoch = 0;
  double mean_loss = 0.0;
  MetricsReport validation;
};

struct FoldResult {
  int fold_index = 0;
  int best_epoch = 0;
  MetricsReport best;
  std::vector<EpochStats> epochs;
  Parameters best_params;
  int64_t best_step = 0;
  std::vector<LabelSequence> gold;
  std::vector<LabelSequence> predictions;  // at the best epoch
};

struct TrainResult {
  std::vector<FoldResult> folds;
  MetricsReport averaged;

  std::size_t best_fold() const;
};

using TrainLog = std::function<void(const std::string&)>;

// One optimizer step: train-mode forward, masked loss, backward, AdamW.
double train_step(Parameters& params, OptimizerState& state, const Batch& batch,
                  const HyperParams& hyper, uint64_t dropout_seed);

// Word-level gold and argmax predictions read at first-piece positions.
void predict_examples(const Parameters& params,
                      const std::vector<AlignedExample>& examples,
                      std::size_t batch_size, std::vector<LabelSequence>& gold,
                      std::vector<LabelSequence>& pred);

FoldResult train_fold(const std::vector<AlignedExample>& examples,
                      const std::vector<std::size_t>& train_indices,
                      const std::vector<std::size_t>& val_indices,
                      const TrainConfig& config, int fold_index,
                      const TrainLog& log = {});

// K-fold (or single split) training; the reported score per fold is the best
// validation epoch and the summary is the macro average over folds.
TrainResult cross_validate(const std::vector<AlignedExample>& examples,
                           const TrainConfig& config, const TrainLog& log = {});

}  // namespace recallner

#endif  // RECALLNER_TRAINER_H_
