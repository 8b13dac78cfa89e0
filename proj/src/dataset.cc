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

#include "recallner/dataset.h"

#include <algorithm>
#include <numeric>
#include <random>
#include <stdexcept>

#include "recallner/digest.h"

namespace recallner {

namespace {

std::vector<std::size_t> shuffled_indices(std::size_t n, uint64_t seed) {
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::mt19937_64 rng(seed);
  seeded_shuffle(order, rng);
  return order;
}

}  // namespace

std::vector<Fold> kfold(std::size_t n, std::size_t k, uint64_t seed) {
  if (k < 2 || k > n) {
    throw std::invalid_argument("kfold requires 2 <= k <= n (k=" +
                                std::to_string(k) + ", n=" + std::to_string(n) +
                                ")");
  }
  const std::vector<std::size_t> order = shuffled_indices(n, seed);
  std::vector<Fold> folds(k);
  std::size_t offset = 0;
  for (std::size_t f = 0; f < k; ++f) {
    const std::size_t size = n / k + (f < n % k ? 1 : 0);
    Fold& fold = folds[f];
    fold.fold_index = static_cast<int>(f);
    fold.val_indices.assign(order.begin() + static_cast<long>(offset),
                            order.begin() + static_cast<long>(offset + size));
    fold.train_indices.reserve(n - size);
    fold.train_indices.insert(fold.train_indices.end(), order.begin(),
                              order.begin() + static_cast<long>(offset));
    fold.train_indices.insert(fold.train_indices.end(),
                              order.begin() + static_cast<long>(offset + size),
                              order.end());
    offset += size;
  }
  return folds;
}

std::pair<std::vector<std::size_t>, std::vector<std::size_t>> train_test_split(
    std::size_t n, double test_fraction, uint64_t seed) {
  if (!(test_fraction > 0.0 && test_fraction < 1.0)) {
    throw std::invalid_argument("test fraction must be in (0, 1)");
  }
  const std::size_t test_size = ceil_fraction(test_fraction, n);
  if (test_size == 0 || test_size >= n) {
    throw std::invalid_argument("train/test split leaves an empty side");
  }
  std::vector<std::size_t> order = shuffled_indices(n, seed);
  std::vector<std::size_t> test(order.begin(),
                                order.begin() + static_cast<long>(test_size));
  std::vector<std::size_t> train(order.begin() + static_cast<long>(test_size),
                                 order.end());
  return {std::move(train), std::move(test)};
}

std::vector<Batch> collate(const std::vector<AlignedExample>& examples,
                           std::size_t batch_size, int pad_id) {
  if (batch_size == 0) throw std::invalid_argument("batch size must be >= 1");
  std::vector<Batch> batches;
  for (std::size_t first = 0; first < examples.size(); first += batch_size) {
    const std::size_t last = std::min(examples.size(), first + batch_size);
    Batch b;
    b.rows = last - first;
    for (std::size_t i = first; i < last; ++i) {
      b.cols = std::max(b.cols, examples[i].size());
    }
    b.ids.assign(b.rows * b.cols, pad_id);
    b.labels.assign(b.rows * b.cols, LabelScheme::kIgnore);
    b.attention_mask.assign(b.rows * b.cols, 0);
    for (std::size_t r = 0; r < b.rows; ++r) {
      const AlignedExample& ex = examples[first + r];
      b.lengths.push_back(ex.size());
      std::copy(ex.ids.begin(), ex.ids.end(), b.ids.begin() + r * b.cols);
      std::copy(ex.labels.begin(), ex.labels.end(),
                b.labels.begin() + r * b.cols);
      std::copy(ex.attention_mask.begin(), ex.attention_mask.end(),
                b.attention_mask.begin() + r * b.cols);
    }
    batches.push_back(std::move(b));
  }
  return batches;
}

std::vector<AlignedExample> uncollate(const std::vector<Batch>& batches) {
  std::vector<AlignedExample> out;
  for (const Batch& b : batches) {
    for (std::size_t r = 0; r < b.rows; ++r) {
      AlignedExample ex;
      auto row = [&](const std::vector<int>& v) {
        auto begin = v.begin() + static_cast<long>(r * b.cols);
        return std::vector<int>(begin, begin + static_cast<long>(b.lengths[r]));
      };
      ex.ids = row(b.ids);
      ex.labels = row(b.labels);
      ex.attention_mask = row(b.attention_mask);
      out.push_back(std::move(ex));
    }
  }
  return out;
}

}  // namespace recallner
