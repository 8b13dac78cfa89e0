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

#include "recallner/adamw.h"

#include <cmath>
#include <vector>

namespace recallner {

void HyperParams::validate() const {
  if (!(learning_rate > 0.0)) throw ModelError("learning rate must be > 0");
  if (!(beta1 >= 0.0 && beta1 < 1.0) || !(beta2 >= 0.0 && beta2 < 1.0)) {
    throw ModelError("betas must be in [0, 1)");
  }
  if (!(epsilon > 0.0)) throw ModelError("epsilon must be > 0");
  if (!(weight_decay >= 0.0)) throw ModelError("weight decay must be >= 0");
}

nlohmann::json to_json(const HyperParams& h) {
  return {{"learning_rate", h.learning_rate},
          {"beta1", h.beta1},
          {"beta2", h.beta2},
          {"epsilon", h.epsilon},
          {"weight_decay", h.weight_decay}};
}

HyperParams hyper_params_from_json(const nlohmann::json& obj) {
  HyperParams h;
  h.learning_rate = obj.value("learning_rate", h.learning_rate);
  h.beta1 = obj.value("beta1", h.beta1);
  h.beta2 = obj.value("beta2", h.beta2);
  h.epsilon = obj.value("epsilon", h.epsilon);
  h.weight_decay = obj.value("weight_decay", h.weight_decay);
  return h;
}

OptimizerState OptimizerState::zeros_like(const Parameters& params) {
  return {params.zeros_like(), params.zeros_like(), 0};
}

void adamw_update(std::span<double> theta, std::span<const double> grad,
                  std::span<double> m, std::span<double> v, int64_t t,
                  const HyperParams& h) {
  const double bias1 = 1.0 - std::pow(h.beta1, static_cast<double>(t));
  const double bias2 = 1.0 - std::pow(h.beta2, static_cast<double>(t));
  for (std::size_t i = 0; i < theta.size(); ++i) {
    const double g = grad[i];
    m[i] = h.beta1 * m[i] + (1.0 - h.beta1) * g;
    v[i] = h.beta2 * v[i] + (1.0 - h.beta2) * g * g;
    const double m_hat = m[i] / bias1;
    const double v_hat = v[i] / bias2;
    const double old = theta[i];
    theta[i] = old - h.learning_rate * m_hat / (std::sqrt(v_hat) + h.epsilon) -
               h.learning_rate * h.weight_decay * old;
  }
}

void adamw_step(Parameters& params, const Gradients& grads,
                OptimizerState& state, const HyperParams& hyper) {
  hyper.validate();
  if (state.t < 0) throw ModelError("optimizer step count must be >= 0");

  std::vector<Matrix*> theta;
  std::vector<const Matrix*> g;
  std::vector<Matrix*> m;
  std::vector<Matrix*> v;
  params.for_each([&](const std::string&, Matrix& x) { theta.push_back(&x); });
  grads.for_each([&](const std::string& name, const Matrix& x) {
    if (!x.allFinite()) throw ModelError("non-finite gradient in " + name);
    g.push_back(&x);
  });
  state.m.for_each([&](const std::string&, Matrix& x) { m.push_back(&x); });
  state.v.for_each([&](const std::string&, Matrix& x) { v.push_back(&x); });
  if (theta.size() != g.size() || theta.size() != m.size() ||
      theta.size() != v.size()) {
    throw ModelError("optimizer state does not match parameters");
  }
  for (std::size_t i = 0; i < theta.size(); ++i) {
    if (theta[i]->size() != g[i]->size() || theta[i]->size() != m[i]->size() ||
        theta[i]->size() != v[i]->size()) {
      throw ModelError("optimizer state does not match parameters");
    }
  }

  ++state.t;
  for (std::size_t i = 0; i < theta.size(); ++i) {
    const auto n = static_cast<std::size_t>(theta[i]->size());
    adamw_update({theta[i]->data(), n}, {g[i]->data(), n}, {m[i]->data(), n},
                 {v[i]->data(), n}, state.t, hyper);
  }
}

}  // namespace recallner
