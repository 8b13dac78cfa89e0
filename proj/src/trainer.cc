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

#include "recallner/trainer.h"

#include <cstdio>
#include <random>

#include "recallner/digest.h"

namespace recallner {

namespace {

// splitmix64 finalizer; derives independent stream seeds.
uint64_t mix(uint64_t a, uint64_t b) {
  uint64_t z = a + 0x9e3779b97f4a7c15ULL * (b + 1);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

std::vector<AlignedExample> subset(const std::vector<AlignedExample>& all,
                                   const std::vector<std::size_t>& indices) {
  std::vector<AlignedExample> out;
  out.reserve(indices.size());
  for (std::size_t i : indices) out.push_back(all[i]);
  return out;
}

}  // namespace

void TrainConfig::validate() const {
  model.validate();
  hyper.validate();
  if (epochs < 1) throw ModelError("epochs must be >= 1");
  if (batch_size < 1) throw ModelError("batch size must be >= 1");
  if (use_kfold && k < 2) throw ModelError("k must be >= 2");
}

nlohmann::json to_json(const TrainConfig& c) {
  return {{"model", to_json(c.model)},
          {"hyper", to_json(c.hyper)},
          {"epochs", c.epochs},
          {"batch_size", c.batch_size},
          {"k", c.k},
          {"use_kfold", c.use_kfold},
          {"test_fraction", c.test_fraction},
          {"seed", c.seed}};
}

TrainConfig train_config_from_json(const nlohmann::json& obj) {
  TrainConfig c;
  if (obj.contains("model")) c.model = model_config_from_json(obj["model"]);
  if (obj.contains("hyper")) c.hyper = hyper_params_from_json(obj["hyper"]);
  c.epochs = obj.value("epochs", c.epochs);
  c.batch_size = obj.value("batch_size", c.batch_size);
  c.k = obj.value("k", c.k);
  c.use_kfold = obj.value("use_kfold", c.use_kfold);
  c.test_fraction = obj.value("test_fraction", c.test_fraction);
  c.seed = obj.value("seed", c.seed);
  return c;
}

std::size_t TrainResult::best_fold() const {
  std::size_t best = 0;
  for (std::size_t i = 1; i < folds.size(); ++i) {
    if (folds[i].best.f1 > folds[best].best.f1) best = i;
  }
  return best;
}

double train_step(Parameters& params, OptimizerState& state, const Batch& batch,
                  const HyperParams& hyper, uint64_t dropout_seed) {
  ForwardResult fwd = forward(params, batch, ForwardMode::training(dropout_seed));
  LossResult loss = masked_cross_entropy(fwd.logits, batch.labels);
  Gradients grads = backward(params, fwd.cache, loss.d_logits);
  adamw_step(params, grads, state, hyper);
  return loss.loss;
}

void predict_examples(const Parameters& params,
                      const std::vector<AlignedExample>& examples,
                      std::size_t batch_size, std::vector<LabelSequence>& gold,
                      std::vector<LabelSequence>& pred) {
  gold.clear();
  pred.clear();
  std::size_t next = 0;
  for (const Batch& batch : collate(examples, batch_size)) {
    ForwardResult fwd = forward(params, batch, ForwardMode::eval());
    for (std::size_t r = 0; r < batch.rows; ++r, ++next) {
      LabelSequence g{examples[next].doc_id, {}};
      LabelSequence p{examples[next].doc_id, {}};
      for (std::size_t c = 0; c < batch.lengths[r]; ++c) {
        const int label = batch.label(r, c);
        if (label == LabelScheme::kIgnore) continue;
        Eigen::Index arg = 0;
        fwd.logits.row(static_cast<Eigen::Index>(r * batch.cols + c))
            .maxCoeff(&arg);
        g.labels.push_back(label);
        p.labels.push_back(static_cast<int>(arg));
      }
      gold.push_back(std::move(g));
      pred.push_back(std::move(p));
    }
  }
}

FoldResult train_fold(const std::vector<AlignedExample>& examples,
                      const std::vector<std::size_t>& train_indices,
                      const std::vector<std::size_t>& val_indices,
                      const TrainConfig& config, int fold_index,
                      const TrainLog& log) {
  config.validate();
  const uint64_t fold_seed = mix(config.seed, static_cast<uint64_t>(fold_index));
  ModelConfig model = config.model;
  model.seed = mix(model.seed, fold_seed);
  Parameters params = init_params(model);
  OptimizerState state = OptimizerState::zeros_like(params);
  const std::vector<AlignedExample> val = subset(examples, val_indices);

  FoldResult result;
  result.fold_index = fold_index;
  result.best.f1 = -1.0;
  std::vector<std::size_t> order = train_indices;
  for (int epoch = 1; epoch <= config.epochs; ++epoch) {
    std::mt19937_64 rng(mix(fold_seed, static_cast<uint64_t>(epoch)));
    seeded_shuffle(order, rng);
    double loss_sum = 0.0;
    std::size_t steps = 0;
    for (const Batch& batch : collate(subset(examples, order), config.batch_size)) {
      loss_sum += train_step(params, state, batch, config.hyper,
                             mix(fold_seed, static_cast<uint64_t>(state.t) + 1000003));
      ++steps;
    }
    EpochStats stats;
    stats.epoch = epoch;
    stats.mean_loss = steps ? loss_sum / static_cast<double>(steps) : 0.0;
    std::vector<LabelSequence> gold;
    std::vector<LabelSequence> pred;
    predict_examples(params, val, config.batch_size, gold, pred);
    stats.validation = score_documents(gold, pred);
    if (stats.validation.f1 > result.best.f1) {
      result.best = stats.validation;
      result.best_epoch = epoch;
      result.best_params = params;
      result.best_step = state.t;
      result.gold = std::move(gold);
      result.predictions = std::move(pred);
    }
    if (log) {
      char line[160];
      std::snprintf(line, sizeof(line),
                    "fold %d epoch %d loss %.4f val P %.2f R %.2f F1 %.2f",
                    fold_index, epoch, stats.mean_loss,
                    stats.validation.precision, stats.validation.recall,
                    stats.validation.f1);
      log(line);
    }
    result.epochs.push_back(std::move(stats));
  }
  return result;
}

TrainResult cross_validate(const std::vector<AlignedExample>& examples,
                           const TrainConfig& config, const TrainLog& log) {
  config.validate();
  TrainResult result;
  if (config.use_kfold) {
    for (const Fold& fold : kfold(examples.size(), config.k, config.seed)) {
      result.folds.push_back(train_fold(examples, fold.train_indices,
                                        fold.val_indices, config,
                                        fold.fold_index, log));
    }
  } else {
    auto [train, test] =
        train_test_split(examples.size(), config.test_fraction, config.seed);
    result.folds.push_back(train_fold(examples, train, test, config, 0, log));
  }
  std::vector<MetricsReport> reports;
  for (const auto& f : result.folds) reports.push_back(f.best);
  result.averaged = average_folds(reports);
  return result;
}

}  // namespace recallner
