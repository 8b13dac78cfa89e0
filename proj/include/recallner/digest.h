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

#ifndef RECALLNER_DIGEST_H_
#define RECALLNER_DIGEST_H_

#include <cstdint>
#include <random>
#include <string>
#include <string_view>
#include <vector>

namespace recallner {

// Lowercase hex SHA-256.
std::string sha256_hex(std::string_view bytes);
std::string sha256_file(const std::string& path);

std::string read_file(const std::string& path);
void write_file(const std::string& path, std::string_view bytes);

// Portable uniform index in [0, n); std::uniform_int_distribution is
// implementation-defined, which would make shuffles differ across toolchains.
std::size_t uniform_index(std::mt19937_64& rng, std::size_t n);

template <typename T>
void seeded_shuffle(std::vector<T>& items, std::mt19937_64& rng) {
  for (std::size_t i = items.size(); i > 1; --i) {
    std::size_t j = uniform_index(rng, i);
    std::swap(items[i - 1], items[j]);
  }
}

// ceil(fraction * n) robust to representation error (0.1 * 30 is 3, not 4).
std::size_t ceil_fraction(double fraction, std::size_t n);

}  // namespace recallner

#endif  // RECALLNER_DIGEST_H_
