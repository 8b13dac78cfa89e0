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


#ifndef RECALLNER_TESTS_MODEL_FIXTURES_H_
#define RECALLNER_TESTS_MODEL_FIXTURES_H_

#include <algorithm>
#include <cmath>
#include <map>
#include <random>
#include <string>
#include <vector>

#include "recallner/annotation.h"
#include "recallner/dataset.h"
#include "recallner/model.h"

namespace recallner::testing {

inline ModelConfig tiny_config(int vocab = 20, int d_model = 16, int layers = 2,
                               int heads = 2, int positions = 16) {
  ModelConfig c;
  c.vocab_size = vocab;
  c.d_model = d_model;
  c.n_layers = layers;
  c.n_heads = heads;
  c.d_ff = 2 * d_model;
  c.max_positions = positions;
  c.dropout_rate = 0.1;
  c.seed = 3;
  return c;
}

// Random aligned examples: [CLS] content [SEP], some content positions
// ignored as if they were continuation pieces.
inline std::vector<AlignedExample> random_examples(std::mt19937_64& rng,
                                                   std::size_t count,
                                                   std::size_t min_len,
                                                   std::size_t max_len,
                                                   int vocab) {
  std::vector<AlignedExample> out;
  for (std::size_t e = 0; e < count; ++e) {
    AlignedExample ex;
    ex.doc_id = "x" + std::to_string(e);
    const std::size_t len = min_len + rng() % (max_len - min_len + 1);
    for (std::size_t i = 0; i < len; ++i) {
      const bool special = i == 0 || i + 1 == len;
      ex.ids.push_back(special ? 2 : 4 + static_cast<int>(rng() % static_cast<uint64_t>(vocab - 4)));
      ex.labels.push_back(special || rng() % 4 == 0 ? LabelScheme::kIgnore
                                                    : static_cast<int>(rng() % 4));
      ex.attention_mask.push_back(1);
    }
    out.push_back(std::move(ex));
  }
  return out;
}

inline double loss_of(const Parameters& p, const Batch& b, ForwardMode mode) {
  return masked_cross_entropy(forward(p, b, mode).logits, b.labels).loss;
}

// Per-tensor relative error ||analytic - numeric|| / max(||analytic||,
// ||numeric||) with central differences of step h.
// Per-tensor relative error uses this floor on the gradient norm.
inline constexpr double kGradNormFloor = 1e-6;

inline std::map<std::string, double> gradient_check(Parameters params,
                                                    const Batch& batch,
                                                    ForwardMode mode,
                                                    double h = 1e-5) {
  ForwardResult fwd = forward(params, batch, mode);
  LossResult loss = masked_cross_entropy(fwd.logits, batch.labels);
  const Gradients analytic = backward(params, fwd.cache, loss.d_logits);

  std::vector<Matrix> grads;
  analytic.for_each([&](const std::string&, const Matrix& g) { grads.push_back(g); });

  std::map<std::string, double> errors;
  std::size_t index = 0;
  std::vector<std::pair<std::string, Matrix*>> tensors;
  params.for_each([&](const std::string& name, Matrix& m) { tensors.emplace_back(name, &m); });
  for (auto& [name, tensor] : tensors) {
    const Matrix& g = grads[index++];
    Matrix numeric = Matrix::Zero(tensor->rows(), tensor->cols());
    for (Eigen::Index i = 0; i < tensor->size(); ++i) {
      double& x = tensor->data()[i];
      const double saved = x;
      x = saved + h;
      const double up = loss_of(params, batch, mode);
      x = saved - h;
      const double down = loss_of(params, batch, mode);
      x = saved;
      numeric.data()[i] = (up - down) / (2 * h);
    }
    // Some tensors (the key bias) have an exactly zero gradient, so the
    // denominator is floored to keep difference noise from reading as error.
    const double scale = std::max({g.norm(), numeric.norm(), kGradNormFloor});
    errors[name] = (g - numeric).norm() / scale;
  }
  return errors;
}

}  // namespace recallner::testing

#endif  // RECALLNER_TESTS_MODEL_FIXTURES_H_
