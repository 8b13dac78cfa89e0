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

#ifndef RECALLNER_CURATION_H_
#define RECALLNER_CURATION_H_

#include <cstdint>
#include <map>
#include <string>
#include <string_view>
#include <vector>

#include "recallner/ingest.h"

namespace recallner {

// Curated device-vocabulary candidates. Tokens are unique, non-empty and
// never made of digits only.
struct VocabCandidateSet {
  std::vector<std::string> tokens;
  std::map<std::string, std::size_t> provenance_counts;
  uint64_t seed = 0;
  std::size_t raw_count = 0;
};

enum class OrderStrategy { kShuffle, kFifo, kLengthDesc };

OrderStrategy parse_order_strategy(std::string_view name);
std::string_view to_string(OrderStrategy strategy);

// Splits a field into raw word tokens on whitespace and list separators
// (',', ';', '|'). Punctuation attached to a word is kept; curate_tokens
// strips it.
std::vector<std::string> split_field(std::string_view field);

// device_name and product_description of every recall, then device_name of
// every classification record, in input order.
std::vector<std::string> extract_vocab_candidates(
    const std::vector<RecallRecord>& records,
    const std::vector<ClassificationRecord>& classification_records);

// Strip leading/trailing punctuation, drop empty and ASCII-digit-only tokens,
// dedupe case-sensitively, then shuffle deterministically by seed.
VocabCandidateSet curate_tokens(const std::vector<std::string>& raw_tokens,
                                uint64_t seed);

// Uniform sample without replacement of ceil(fraction * n) records.
std::vector<RecallRecord> sample_for_annotation(
    const std::vector<RecallRecord>& records, double fraction, uint64_t seed);

std::vector<std::string> order_candidates(std::vector<std::string> candidates,
                                          OrderStrategy strategy,
                                          uint64_t seed);

// Candidate-set file: a "# seed=... raw=... unique=..." header line followed
// by one token per line.
void save_candidates(const VocabCandidateSet& set, const std::string& path);
VocabCandidateSet load_candidates(const std::string& path);

}  // namespace recallner

#endif  // RECALLNER_CURATION_H_
