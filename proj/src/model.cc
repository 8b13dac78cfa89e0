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

#include "recallner/model.h"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>

namespace recallner {

namespace {

using Eigen::Index;

constexpr double kLayerNormEps = 1e-5;
constexpr double kInitStd = 0.02;

double uniform01(std::mt19937_64& rng) {
  return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

Matrix dropout_mask(Index rows, Index cols, double rate, std::mt19937_64& rng) {
  Matrix mask(rows, cols);
  const double scale = 1.0 / (1.0 - rate);
  for (Index i = 0; i < mask.size(); ++i) {
    mask.data()[i] = uniform01(rng) < rate ? 0.0 : scale;
  }
  return mask;
}

void fill_normal(Matrix& m, std::mt19937_64& rng) {
  std::normal_distribution<double> normal(0.0, kInitStd);
  for (Index i = 0; i < m.size(); ++i) m.data()[i] = normal(rng);
}

Matrix linear(const Matrix& x, const Matrix& weight, const Matrix& bias) {
  Matrix y = x * weight;
  y.rowwise() += bias.row(0);
  return y;
}

Matrix layer_norm(const Matrix& x, const Matrix& gain, const Matrix& bias,
                  LayerNormCache& cache) {
  const Index rows = x.rows();
  cache.normalized.resize(rows, x.cols());
  cache.rstd.resize(rows);
  Matrix y(rows, x.cols());
  for (Index r = 0; r < rows; ++r) {
    const double mean = x.row(r).mean();
    Eigen::RowVectorXd centered = x.row(r).array() - mean;
    const double var = centered.squaredNorm() / static_cast<double>(x.cols());
    const double rstd = 1.0 / std::sqrt(var + kLayerNormEps);
    cache.rstd(r) = rstd;
    cache.normalized.row(r) = centered * rstd;
    y.row(r) = cache.normalized.row(r).cwiseProduct(gain.row(0)) + bias.row(0);
  }
  return y;
}

Matrix layer_norm_backward(const Matrix& dy, const Matrix& gain,
                           const LayerNormCache& cache, Matrix& d_gain,
                           Matrix& d_bias) {
  d_gain += dy.cwiseProduct(cache.normalized).colwise().sum();
  d_bias += dy.colwise().sum();
  Matrix dx(dy.rows(), dy.cols());
  for (Index r = 0; r < dy.rows(); ++r) {
    Eigen::RowVectorXd dxhat = dy.row(r).cwiseProduct(gain.row(0));
    const double mean_dxhat = dxhat.mean();
    const double mean_proj = dxhat.cwiseProduct(cache.normalized.row(r)).mean();
    dx.row(r) = cache.rstd(r) *
                (dxhat.array() - mean_dxhat -
                 cache.normalized.row(r).array() * mean_proj)
                    .matrix();
  }
  return dx;
}

double gelu(double x) { return 0.5 * x * (1.0 + std::erf(x * M_SQRT1_2)); }

double gelu_grad(double x) {
  const double cdf = 0.5 * (1.0 + std::erf(x * M_SQRT1_2));
  const double pdf = std::exp(-0.5 * x * x) * 0.5 * M_2_SQRTPI * M_SQRT1_2;
  return cdf + x * pdf;
}

void softmax_in_place(Matrix& scores) {
  for (Index r = 0; r < scores.rows(); ++r) {
    const double max = scores.row(r).maxCoeff();
    if (!std::isfinite(max)) {
      scores.row(r).setZero();
      continue;
    }
    scores.row(r) = (scores.row(r).array() - max).exp().matrix();
    scores.row(r) /= scores.row(r).sum();
  }
}

Matrix zeros(Index rows, Index cols) { return Matrix::Zero(rows, cols); }

LayerParams make_layer(const ModelConfig& c, std::mt19937_64& rng) {
  LayerParams p;
  const Index d = c.d_model;
  const Index ff = c.d_ff;
  p.ln1_gain = Matrix::Ones(1, d);
  p.ln1_bias = zeros(1, d);
  for (Matrix* w : {&p.wq, &p.wk, &p.wv, &p.wo}) {
    w->resize(d, d);
    fill_normal(*w, rng);
  }
  p.bq = zeros(1, d);
  p.bk = zeros(1, d);
  p.bv = zeros(1, d);
  p.bo = zeros(1, d);
  p.ln2_gain = Matrix::Ones(1, d);
  p.ln2_bias = zeros(1, d);
  p.ff1_weight.resize(d, ff);
  fill_normal(p.ff1_weight, rng);
  p.ff1_bias = zeros(1, ff);
  p.ff2_weight.resize(ff, d);
  fill_normal(p.ff2_weight, rng);
  p.ff2_bias = zeros(1, d);
  return p;
}

void forward_sequence(const Parameters& params, const Batch& batch,
                      std::size_t row, const ForwardMode& mode,
                      std::mt19937_64& rng, SequenceCache& sc,
                      Eigen::Ref<Matrix> logits) {
  const ModelConfig& c = params.config;
  const Index len = static_cast<Index>(
      batch.lengths.empty() ? batch.cols : std::min(batch.lengths[row], batch.cols));
  const Index dh = c.head_dim();
  const double scale = 1.0 / std::sqrt(static_cast<double>(dh));
  const bool dropout = mode.train && c.dropout_rate > 0.0;

  sc.ids.resize(static_cast<std::size_t>(len));
  sc.key_mask.resize(static_cast<std::size_t>(len));
  Matrix x(len, c.d_model);
  for (Index t = 0; t < len; ++t) {
    const int id = batch.id(row, static_cast<std::size_t>(t));
    if (id < 0 || id >= c.vocab_size) {
      throw ModelError("token id " + std::to_string(id) +
                       " outside vocabulary of size " +
                       std::to_string(c.vocab_size));
    }
    sc.ids[static_cast<std::size_t>(t)] = id;
    sc.key_mask[static_cast<std::size_t>(t)] =
        batch.mask(row, static_cast<std::size_t>(t));
    x.row(t) = params.token_embedding.row(id) + params.position_embedding.row(t);
  }
  if (dropout) {
    sc.embed_dropout = dropout_mask(len, c.d_model, c.dropout_rate, rng);
    x = x.cwiseProduct(sc.embed_dropout);
  }

  sc.layers.resize(params.layers.size());
  for (std::size_t l = 0; l < params.layers.size(); ++l) {
    const LayerParams& p = params.layers[l];
    LayerCache& lc = sc.layers[l];
    lc.input = x;
    lc.ln1_out = layer_norm(x, p.ln1_gain, p.ln1_bias, lc.ln1);
    lc.q = linear(lc.ln1_out, p.wq, p.bq);
    lc.k = linear(lc.ln1_out, p.wk, p.bk);
    lc.v = linear(lc.ln1_out, p.wv, p.bv);
    lc.context.resize(len, c.d_model);
    lc.probs.resize(static_cast<std::size_t>(c.n_heads));
    for (int h = 0; h < c.n_heads; ++h) {
      Matrix scores = lc.q.middleCols(h * dh, dh) *
                      lc.k.middleCols(h * dh, dh).transpose() * scale;
      for (Index j = 0; j < len; ++j) {
        if (sc.key_mask[static_cast<std::size_t>(j)] == 0) {
          scores.col(j).setConstant(-std::numeric_limits<double>::infinity());
        }
      }
      softmax_in_place(scores);
      lc.context.middleCols(h * dh, dh) = scores * lc.v.middleCols(h * dh, dh);
      lc.probs[static_cast<std::size_t>(h)] = std::move(scores);
    }
    Matrix attn = linear(lc.context, p.wo, p.bo);
    if (dropout) {
      lc.attn_dropout = dropout_mask(len, c.d_model, c.dropout_rate, rng);
      attn = attn.cwiseProduct(lc.attn_dropout);
    }
    x += attn;
    lc.residual1 = x;
    lc.ln2_out = layer_norm(x, p.ln2_gain, p.ln2_bias, lc.ln2);
    lc.ff_pre = linear(lc.ln2_out, p.ff1_weight, p.ff1_bias);
    lc.ff_act = lc.ff_pre.unaryExpr([](double v) { return gelu(v); });
    Matrix ff = linear(lc.ff_act, p.ff2_weight, p.ff2_bias);
    if (dropout) {
      lc.ff_dropout = dropout_mask(len, c.d_model, c.dropout_rate, rng);
      ff = ff.cwiseProduct(lc.ff_dropout);
    }
    x += ff;
  }

  sc.final_input = x;
  sc.final_out =
      layer_norm(x, params.final_ln_gain, params.final_ln_bias, sc.final_ln);
  logits.setZero();
  logits.topRows(len) = linear(sc.final_out, params.classifier_weight,
                               params.classifier_bias);
}

void backward_sequence(const Parameters& params, const SequenceCache& sc,
                       const Eigen::Ref<const Matrix>& d_logits_all,
                       Gradients& g) {
  const ModelConfig& c = params.config;
  const Index len = static_cast<Index>(sc.ids.size());
  const Index dh = c.head_dim();
  const double scale = 1.0 / std::sqrt(static_cast<double>(dh));
  const auto d_logits = d_logits_all.topRows(len);

  g.classifier_weight += sc.final_out.transpose() * d_logits;
  g.classifier_bias += d_logits.colwise().sum();
  Matrix d_final = d_logits * params.classifier_weight.transpose();
  Matrix dx = layer_norm_backward(d_final, params.final_ln_gain, sc.final_ln,
                                  g.final_ln_gain, g.final_ln_bias);

  for (std::size_t li = params.layers.size(); li-- > 0;) {
    const LayerParams& p = params.layers[li];
    const LayerCache& lc = sc.layers[li];
    LayerParams& gp = g.layers[li];

    Matrix d_ff = lc.ff_dropout.size() ? dx.cwiseProduct(lc.ff_dropout) : dx;
    gp.ff2_weight += lc.ff_act.transpose() * d_ff;
    gp.ff2_bias += d_ff.colwise().sum();
    Matrix d_act = d_ff * p.ff2_weight.transpose();
    Matrix d_pre = d_act.cwiseProduct(
        lc.ff_pre.unaryExpr([](double v) { return gelu_grad(v); }));
    gp.ff1_weight += lc.ln2_out.transpose() * d_pre;
    gp.ff1_bias += d_pre.colwise().sum();
    Matrix d_ln2 = d_pre * p.ff1_weight.transpose();
    dx += layer_norm_backward(d_ln2, p.ln2_gain, lc.ln2, gp.ln2_gain,
                              gp.ln2_bias);

    Matrix d_attn =
        lc.attn_dropout.size() ? dx.cwiseProduct(lc.attn_dropout) : dx;
    gp.wo += lc.context.transpose() * d_attn;
    gp.bo += d_attn.colwise().sum();
    Matrix d_context = d_attn * p.wo.transpose();

    Matrix dq = Matrix::Zero(len, c.d_model);
    Matrix dk = Matrix::Zero(len, c.d_model);
    Matrix dv = Matrix::Zero(len, c.d_model);
    for (int h = 0; h < c.n_heads; ++h) {
      const Matrix& probs = lc.probs[static_cast<std::size_t>(h)];
      auto d_ctx_h = d_context.middleCols(h * dh, dh);
      Matrix d_probs = d_ctx_h * lc.v.middleCols(h * dh, dh).transpose();
      dv.middleCols(h * dh, dh) = probs.transpose() * d_ctx_h;
      Eigen::VectorXd row_dot = d_probs.cwiseProduct(probs).rowwise().sum();
      Matrix d_scores =
          probs.cwiseProduct(d_probs.colwise() - row_dot) * scale;
      dq.middleCols(h * dh, dh) = d_scores * lc.k.middleCols(h * dh, dh);
      dk.middleCols(h * dh, dh) =
          d_scores.transpose() * lc.q.middleCols(h * dh, dh);
    }
    gp.wq += lc.ln1_out.transpose() * dq;
    gp.bq += dq.colwise().sum();
    gp.wk += lc.ln1_out.transpose() * dk;
    gp.bk += dk.colwise().sum();
    gp.wv += lc.ln1_out.transpose() * dv;
    gp.bv += dv.colwise().sum();
    Matrix d_ln1 = dq * p.wq.transpose() + dk * p.wk.transpose() +
                   dv * p.wv.transpose();
    dx += layer_norm_backward(d_ln1, p.ln1_gain, lc.ln1, gp.ln1_gain,
                              gp.ln1_bias);
  }

  if (sc.embed_dropout.size()) dx = dx.cwiseProduct(sc.embed_dropout);
  for (Index t = 0; t < len; ++t) {
    g.token_embedding.row(sc.ids[static_cast<std::size_t>(t)]) += dx.row(t);
    g.position_embedding.row(t) += dx.row(t);
  }
}

}  // namespace

void ModelConfig::validate() const {
  if (vocab_size < 1) throw ModelError("vocab_size must be >= 1");
  if (d_model < 1 || n_heads < 1 || d_model % n_heads != 0) {
    throw ModelError("d_model must be a positive multiple of n_heads");
  }
  if (n_layers < 0 || d_ff < 1) throw ModelError("invalid layer shape");
  if (max_positions < 1 || max_positions > 512) {
    throw ModelError("max_positions must be in [1, 512]");
  }
  if (n_labels < 1) throw ModelError("n_labels must be >= 1");
  if (!(dropout_rate >= 0.0 && dropout_rate < 1.0)) {
    throw ModelError("dropout_rate must be in [0, 1)");
  }
}

nlohmann::json to_json(const ModelConfig& c) {
  return {{"vocab_size", c.vocab_size},       {"d_model", c.d_model},
          {"n_layers", c.n_layers},           {"n_heads", c.n_heads},
          {"d_ff", c.d_ff},                   {"max_positions", c.max_positions},
          {"n_labels", c.n_labels},           {"dropout_rate", c.dropout_rate},
          {"seed", c.seed}};
}

ModelConfig model_config_from_json(const nlohmann::json& obj) {
  ModelConfig c;
  c.vocab_size = obj.value("vocab_size", c.vocab_size);
  c.d_model = obj.value("d_model", c.d_model);
  c.n_layers = obj.value("n_layers", c.n_layers);
  c.n_heads = obj.value("n_heads", c.n_heads);
  c.d_ff = obj.value("d_ff", c.d_ff);
  c.max_positions = obj.value("max_positions", c.max_positions);
  c.n_labels = obj.value("n_labels", c.n_labels);
  c.dropout_rate = obj.value("dropout_rate", c.dropout_rate);
  c.seed = obj.value("seed", c.seed);
  return c;
}

Parameters Parameters::zeros_like() const {
  Parameters z = *this;
  z.for_each([](const std::string&, Matrix& m) { m.setZero(); });
  return z;
}

std::size_t Parameters::parameter_count() const {
  std::size_t n = 0;
  for_each([&n](const std::string&, const Matrix& m) {
    n += static_cast<std::size_t>(m.size());
  });
  return n;
}

bool Parameters::all_finite() const {
  bool finite = true;
  for_each([&finite](const std::string&, const Matrix& m) {
    finite = finite && m.allFinite();
  });
  return finite;
}

Parameters init_params(const ModelConfig& config) {
  config.validate();
  std::mt19937_64 rng(config.seed);
  Parameters p;
  p.config = config;
  p.token_embedding.resize(config.vocab_size, config.d_model);
  fill_normal(p.token_embedding, rng);
  p.position_embedding.resize(config.max_positions, config.d_model);
  fill_normal(p.position_embedding, rng);
  for (int l = 0; l < config.n_layers; ++l) {
    p.layers.push_back(make_layer(config, rng));
  }
  p.final_ln_gain = Matrix::Ones(1, config.d_model);
  p.final_ln_bias = zeros(1, config.d_model);
  p.classifier_weight.resize(config.d_model, config.n_labels);
  fill_normal(p.classifier_weight, rng);
  p.classifier_bias = zeros(1, config.n_labels);
  return p;
}

Parameters resize_embeddings(const Parameters& params, int new_vocab_size,
                             uint64_t seed) {
  const int old_size = params.config.vocab_size;
  if (new_vocab_size < old_size) {
    throw ModelError("cannot shrink embeddings from " +
                     std::to_string(old_size) + " to " +
                     std::to_string(new_vocab_size));
  }
  Parameters out = params;
  if (new_vocab_size == old_size) return out;
  out.config.vocab_size = new_vocab_size;
  Matrix extra(new_vocab_size - old_size, params.config.d_model);
  std::mt19937_64 rng(seed);
  fill_normal(extra, rng);
  out.token_embedding.resize(new_vocab_size, params.config.d_model);
  out.token_embedding.topRows(old_size) = params.token_embedding;
  out.token_embedding.bottomRows(new_vocab_size - old_size) = extra;
  return out;
}

ForwardResult forward(const Parameters& params, const Batch& batch,
                      ForwardMode mode) {
  const ModelConfig& c = params.config;
  if (batch.cols > static_cast<std::size_t>(c.max_positions)) {
    throw ModelError("sequence length " + std::to_string(batch.cols) +
                     " exceeds max_positions " +
                     std::to_string(c.max_positions));
  }
  ForwardResult result;
  result.cache.config = c;
  result.cache.rows = batch.rows;
  result.cache.cols = batch.cols;
  result.cache.sequences.resize(batch.rows);
  result.logits.resize(static_cast<Index>(batch.rows * batch.cols), c.n_labels);
  std::mt19937_64 rng(mode.dropout_seed);
  for (std::size_t r = 0; r < batch.rows; ++r) {
    forward_sequence(params, batch, r, mode, rng, result.cache.sequences[r],
                     result.logits.middleRows(static_cast<Index>(r * batch.cols),
                                              static_cast<Index>(batch.cols)));
  }
  return result;
}

LossResult masked_cross_entropy(const Matrix& logits,
                                const std::vector<int>& labels) {
  if (static_cast<std::size_t>(logits.rows()) != labels.size()) {
    throw ModelError("logits/labels shape mismatch");
  }
  LossResult out;
  out.d_logits = Matrix::Zero(logits.rows(), logits.cols());
  for (Index i = 0; i < logits.rows(); ++i) {
    const int label = labels[static_cast<std::size_t>(i)];
    if (label == LabelScheme::kIgnore) continue;
    if (label < 0 || label >= logits.cols()) {
      throw ModelError("label " + std::to_string(label) + " out of range");
    }
    const double max = logits.row(i).maxCoeff();
    Eigen::RowVectorXd e = (logits.row(i).array() - max).exp().matrix();
    const double sum = e.sum();
    out.loss += std::log(sum) + max - logits(i, label);
    out.d_logits.row(i) = e / sum;
    out.d_logits(i, label) -= 1.0;
    ++out.counted;
  }
  if (out.counted > 0) {
    const double n = static_cast<double>(out.counted);
    out.loss /= n;
    out.d_logits /= n;
  }
  return out;
}

Gradients backward(const Parameters& params, const ForwardCache& cache,
                   const Matrix& d_logits) {
  if (!(cache.config == params.config) ||
      cache.sequences.size() != cache.rows ||
      d_logits.rows() != static_cast<Index>(cache.rows * cache.cols) ||
      d_logits.cols() != params.config.n_labels) {
    throw ModelError("forward cache does not match parameters/gradient shape");
  }
  Gradients g = params.zeros_like();
  for (std::size_t r = 0; r < cache.rows; ++r) {
    backward_sequence(params, cache.sequences[r],
                      d_logits.middleRows(static_cast<Index>(r * cache.cols),
                                          static_cast<Index>(cache.cols)),
                      g);
  }
  return g;
}

Matrix softmax_rows(const Matrix& logits) {
  Matrix p = logits;
  softmax_in_place(p);
  return p;
}

}  // namespace recallner
