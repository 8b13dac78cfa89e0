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

#ifndef RECALLNER_DATASET_H_
#define RECALLNER_DATASET_H_

#include <cstdint>
#include <utility>
#include <vector>

#include "recallner/annotation.h"

namespace recallner {

struct Fold {
  int fold_index = 0;
  std::vector<std::size_t> train_indices;
  std::vector<std::size_t> val_indices;
};

// Seeded shuffle of 0..n-1 cut into k validation blocks whose sizes differ by
// at most one. Requires 2 <= k <= n.
std::vector<Fold> kfold(std::size_t n, std::size_t k, uint64_t seed);

// |test| = ceil(test_fraction * n). Requires 0 < test_fraction < 1 and both
// sides non-empty.
std::pair<std::vector<std::size_t>, std::vector<std::size_t>> train_test_split(
    std::size_t n, double test_fraction, uint64_t seed);

// Row-major [rows x cols] batch padded to its own longest row.
struct Batch {
  std::size_t rows = 0;
  std::size_t cols = 0;
  std::vector<int> ids;
  std::vector<int> labels;          // pad = ignore id
  std::vector<int> attention_mask;  // pad = 0
  std::vector<std::size_t> lengths;

  int id(std::size_t r, std::size_t c) const { return ids[r * cols + c]; }
  int label(std::size_t r, std::size_t c) const { return labels[r * cols + c]; }
  int mask(std::size_t r, std::size_t c) const {
    return attention_mask[r * cols + c];
  }
};

// Consecutive groups of at most batch_size examples.
std::vector<Batch> collate(const std::vector<AlignedExample>& examples,
                           std::size_t batch_size = 16, int pad_id = 0);

// Inverse of collate (doc ids are not carried by batches).
std::vector<AlignedExample> uncollate(const std::vector<Batch>& batches);

}  // namespace recallner

#endif  // RECALLNER_DATASET_H_
