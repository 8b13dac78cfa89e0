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

#ifndef RECALLNER_CHECKPOINT_H_
#define RECALLNER_CHECKPOINT_H_

#include <cstdint>
#include <string>

#include "recallner/model.h"

namespace recallner {

// Checkpoint layout:
//
//   bytes 0..7    magic "RNERCKPT"
//   bytes 8..15   header length N, uint64 little-endian
//   next N bytes  JSON header: {"format_version", "config", "seed", "step",
//                 "tensors": [{"name", "rows", "cols"}, ...]}
//   remainder     every tensor in header order, row-major, float32 LE
//
// Parameters are stored at 32-bit precision, so a round trip rounds each
// value to the nearest float.
struct Checkpoint {
  Parameters params;
  uint64_t seed = 0;
  int64_t step = 0;
};

void save_checkpoint(const Checkpoint& ckpt, const std::string& path);
Checkpoint load_checkpoint(const std::string& path);

}  // namespace recallner

#endif  // RECALLNER_CHECKPOINT_H_
