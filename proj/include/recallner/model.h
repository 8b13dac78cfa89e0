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

#ifndef RECALLNER_MODEL_H_
#define RECALLNER_MODEL_H_

#include <Eigen/Dense>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

#include "json.hpp"
#include "recallner/dataset.h"

namespace recallner {

using Matrix =
    Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

class ModelError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct ModelConfig {
  int vocab_size = 0;
  int d_model = 32;
  int n_layers = 2;
  int n_heads = 2;
  int d_ff = 64;
  int max_positions = 512;
  int n_labels = 4;
  double dropout_rate = 0.1;
  uint64_t seed = 0;

  int head_dim() const { return d_model / n_heads; }
  // Throws ModelError on an inconsistent configuration.
  void validate() const;
  bool operator==(const ModelConfig&) const = default;
};

nlohmann::json to_json(const ModelConfig& config);
ModelConfig model_config_from_json(const nlohmann::json& obj);

struct LayerParams {
  Matrix ln1_gain, ln1_bias;
  Matrix wq, bq, wk, bk, wv, bv, wo, bo;
  Matrix ln2_gain, ln2_bias;
  Matrix ff1_weight, ff1_bias, ff2_weight, ff2_bias;
};

// Every tensor is a Matrix; vectors are 1 x n. The same type holds
// gradients and AdamW moments.
struct Parameters {
  ModelConfig config;
  Matrix token_embedding;     // vocab_size x d_model
  Matrix position_embedding;  // max_positions x d_model
  std::vector<LayerParams> layers;
  Matrix final_ln_gain, final_ln_bias;
  Matrix classifier_weight;  // d_model x n_labels
  Matrix classifier_bias;    // 1 x n_labels

  // Visits (name, tensor) in the fixed declaration order used by the
  // optimizer and the checkpoint format.
  template <typename F>
  void for_each(F&& f) {
    visit(*this, f);
  }
  template <typename F>
  void for_each(F&& f) const {
    visit(*this, f);
  }

  Parameters zeros_like() const;
  std::size_t parameter_count() const;
  bool all_finite() const;

 private:
  template <typename Self, typename F>
  static void visit(Self& self, F& f) {
    f(std::string("token_embedding"), self.token_embedding);
    f(std::string("position_embedding"), self.position_embedding);
    for (std::size_t l = 0; l < self.layers.size(); ++l) {
      auto& layer = self.layers[l];
      const std::string p = "layer" + std::to_string(l) + ".";
      f(p + "ln1_gain", layer.ln1_gain);
      f(p + "ln1_bias", layer.ln1_bias);
      f(p + "wq", layer.wq);
      f(p + "bq", layer.bq);
      f(p + "wk", layer.wk);
      f(p + "bk", layer.bk);
      f(p + "wv", layer.wv);
      f(p + "bv", layer.bv);
      f(p + "wo", layer.wo);
      f(p + "bo", layer.bo);
      f(p + "ln2_gain", layer.ln2_gain);
      f(p + "ln2_bias", layer.ln2_bias);
      f(p + "ff1_weight", layer.ff1_weight);
      f(p + "ff1_bias", layer.ff1_bias);
      f(p + "ff2_weight", layer.ff2_weight);
      f(p + "ff2_bias", layer.ff2_bias);
    }
    f(std::string("final_ln_gain"), self.final_ln_gain);
    f(std::string("final_ln_bias"), self.final_ln_bias);
    f(std::string("classifier_weight"), self.classifier_weight);
    f(std::string("classifier_bias"), self.classifier_bias);
  }
};

using Gradients = Parameters;

// normal(0, 0.02) weights, zero biases, unit layer-norm gains.
Parameters init_params(const ModelConfig& config);

// Grows the token embedding to new_vocab_size; old rows are kept bit-exact
// and new rows drawn from normal(0, 0.02).
Parameters resize_embeddings(const Parameters& params, int new_vocab_size,
                             uint64_t seed);

struct ForwardMode {
  bool train = false;
  uint64_t dropout_seed = 0;

  static ForwardMode eval() { return {}; }
  static ForwardMode training(uint64_t seed) { return {true, seed}; }
};

struct LayerNormCache {
  Matrix normalized;   // L x d
  Eigen::VectorXd rstd;  // L
};

struct LayerCache {
  Matrix input;
  LayerNormCache ln1;
  Matrix ln1_out;
  Matrix q, k, v;
  std::vector<Matrix> probs;  // per head, L x L
  Matrix context;
  Matrix attn_dropout;  // scale mask, empty when inactive
  Matrix residual1;
  LayerNormCache ln2;
  Matrix ln2_out;
  Matrix ff_pre;
  Matrix ff_act;
  Matrix ff_dropout;
};

struct SequenceCache {
  std::vector<int> ids;
  std::vector<int> key_mask;
  Matrix embed_dropout;
  std::vector<LayerCache> layers;
  Matrix final_input;
  LayerNormCache final_ln;
  Matrix final_out;
};

struct ForwardCache {
  ModelConfig config;
  std::size_t rows = 0;
  std::size_t cols = 0;
  std::vector<SequenceCache> sequences;
};

struct ForwardResult {
  Matrix logits;  // (rows * cols) x n_labels, row r * cols + c
  ForwardCache cache;
};

// Pre-norm transformer encoder with key-padding-masked self-attention and a
// linear token-classification head. Dropout follows the embedding sum and
// each sublayer output in train mode only. A sequence is processed up to its
// batch length; logits of rows past it are zero.
ForwardResult forward(const Parameters& params, const Batch& batch,
                      ForwardMode mode);

struct LossResult {
  double loss = 0.0;
  Matrix d_logits;
  std::size_t counted = 0;
};

// Mean negative log-softmax over positions whose label is not the ignore id.
// Ignored positions contribute nothing to either output; a fully ignored
// batch yields loss 0 and a zero gradient.
LossResult masked_cross_entropy(const Matrix& logits,
                                const std::vector<int>& labels);

Gradients backward(const Parameters& params, const ForwardCache& cache,
                   const Matrix& d_logits);

// Row-wise softmax.
Matrix softmax_rows(const Matrix& logits);

}  // namespace recallner

#endif  // RECALLNER_MODEL_H_
