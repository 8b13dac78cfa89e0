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

#ifndef RECALLNER_ADAMW_H_
#define RECALLNER_ADAMW_H_

#include <cstdint>
#include <span>

#include "json.hpp"
#include "recallner/model.h"

namespace recallner {

// Defaults are the fine-tuning values: lr 1e-5, betas (0.9, 0.999),
// eps 1e-8, weight decay 0.02.
struct HyperParams {
  double learning_rate = 1e-5;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double epsilon = 1e-8;
  double weight_decay = 0.02;

  void validate() const;
};

nlohmann::json to_json(const HyperParams& hyper);
HyperParams hyper_params_from_json(const nlohmann::json& obj);

struct OptimizerState {
  Parameters m;
  Parameters v;
  int64_t t = 0;

  static OptimizerState zeros_like(const Parameters& params);
};

// One decoupled-weight-decay Adam update over a flat tensor. `t` is the step
// number after incrementing (>= 1).
//   m <- b1 m + (1 - b1) g
//   v <- b2 v + (1 - b2) g^2
//   theta <- theta - lr * m_hat / (sqrt(v_hat) + eps) - lr * w * theta
void adamw_update(std::span<double> theta, std::span<const double> grad,
                  std::span<double> m, std::span<double> v, int64_t t,
                  const HyperParams& hyper);

// Increments state.t, then updates every tensor in place. Throws ModelError
// on a non-finite gradient before touching anything.
void adamw_step(Parameters& params, const Gradients& grads,
                OptimizerState& state, const HyperParams& hyper);

}  // namespace recallner

#endif  // RECALLNER_ADAMW_H_
