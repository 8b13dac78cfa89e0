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

#include "recallner/curation.h"

#include <algorithm>
#include <numeric>
#include <random>
#include <sstream>
#include <stdexcept>

#include "recallner/digest.h"
#include "recallner/text.h"

namespace recallner {

OrderStrategy parse_order_strategy(std::string_view name) {
  if (name == "shuffle") return OrderStrategy::kShuffle;
  if (name == "fifo") return OrderStrategy::kFifo;
  if (name == "length_desc") return OrderStrategy::kLengthDesc;
  throw std::invalid_argument("unknown ordering strategy: " +
                              std::string(name));
}

std::string_view to_string(OrderStrategy strategy) {
  switch (strategy) {
    case OrderStrategy::kShuffle:
      return "shuffle";
    case OrderStrategy::kFifo:
      return "fifo";
    case OrderStrategy::kLengthDesc:
      return "length_desc";
  }
  return "unknown";
}

std::vector<std::string> split_field(std::string_view field) {
  std::vector<std::string> out;
  std::u32string current;
  for (char32_t c : text::decode_utf8(field)) {
    if (text::is_whitespace(c) || c == U',' || c == U';' || c == U'|') {
      if (!current.empty()) out.push_back(text::encode_utf8(current));
      current.clear();
    } else {
      current.push_back(c);
    }
  }
  if (!current.empty()) out.push_back(text::encode_utf8(current));
  return out;
}

std::vector<std::string> extract_vocab_candidates(
    const std::vector<RecallRecord>& records,
    const std::vector<ClassificationRecord>& classification_records) {
  std::vector<std::string> raw;
  auto append = [&raw](std::string_view field) {
    for (auto& t : split_field(field)) raw.push_back(std::move(t));
  };
  for (const auto& r : records) {
    append(r.device_name);
    append(r.product_description);
  }
  for (const auto& c : classification_records) append(c.device_name);
  return raw;
}

VocabCandidateSet curate_tokens(const std::vector<std::string>& raw_tokens,
                                uint64_t seed) {
  VocabCandidateSet set;
  set.seed = seed;
  set.raw_count = raw_tokens.size();
  for (const auto& raw : raw_tokens) {
    std::string token = text::strip_punctuation(raw);
    if (token.empty() || text::is_ascii_digits(token)) continue;
    auto [it, inserted] = set.provenance_counts.emplace(token, 0);
    ++it->second;
    if (inserted) set.tokens.push_back(std::move(token));
  }
  std::mt19937_64 rng(seed);
  seeded_shuffle(set.tokens, rng);
  return set;
}

std::vector<RecallRecord> sample_for_annotation(
    const std::vector<RecallRecord>& records, double fraction, uint64_t seed) {
  if (!(fraction > 0.0 && fraction <= 1.0)) {
    throw std::invalid_argument("sample fraction must be in (0, 1]");
  }
  std::vector<std::size_t> order(records.size());
  std::iota(order.begin(), order.end(), 0);
  std::mt19937_64 rng(seed);
  seeded_shuffle(order, rng);
  order.resize(ceil_fraction(fraction, records.size()));
  std::vector<RecallRecord> out;
  out.reserve(order.size());
  for (std::size_t i : order) out.push_back(records[i]);
  return out;
}

std::vector<std::string> order_candidates(std::vector<std::string> candidates,
                                          OrderStrategy strategy,
                                          uint64_t seed) {
  switch (strategy) {
    case OrderStrategy::kFifo:
      break;
    case OrderStrategy::kShuffle: {
      std::mt19937_64 rng(seed);
      seeded_shuffle(candidates, rng);
      break;
    }
    case OrderStrategy::kLengthDesc: {
      std::vector<std::pair<std::size_t, std::string>> keyed;
      keyed.reserve(candidates.size());
      for (auto& c : candidates) keyed.emplace_back(text::length(c), std::move(c));
      std::stable_sort(keyed.begin(), keyed.end(),
                       [](const auto& a, const auto& b) {
                         return a.first > b.first;
                       });
      for (std::size_t i = 0; i < keyed.size(); ++i) {
        candidates[i] = std::move(keyed[i].second);
      }
      break;
    }
  }
  return candidates;
}

void save_candidates(const VocabCandidateSet& set, const std::string& path) {
  std::ostringstream out;
  out << "# seed=" << set.seed << " raw=" << set.raw_count
      << " unique=" << set.tokens.size() << "\n";
  for (const auto& t : set.tokens) out << t << "\n";
  write_file(path, out.str());
}

VocabCandidateSet load_candidates(const std::string& path) {
  std::vector<std::string> lines = text::read_lines(path);
  VocabCandidateSet set;
  std::size_t first = 0;
  if (!lines.empty() && lines[0].rfind("# ", 0) == 0) {
    std::istringstream header(lines[0].substr(2));
    std::string field;
    while (header >> field) {
      auto eq = field.find('=');
      if (eq == std::string::npos) continue;
      std::string key = field.substr(0, eq);
      std::string value = field.substr(eq + 1);
      if (key == "seed") set.seed = std::stoull(value);
      if (key == "raw") set.raw_count = std::stoull(value);
    }
    first = 1;
  }
  for (std::size_t i = first; i < lines.size(); ++i) {
    if (lines[i].empty()) continue;
    auto [it, inserted] = set.provenance_counts.emplace(lines[i], 1);
    if (!inserted) {
      throw std::runtime_error("duplicate candidate '" + lines[i] + "' in " +
                               path);
    }
    set.tokens.push_back(lines[i]);
  }
  return set;
}

}  // namespace recallner
