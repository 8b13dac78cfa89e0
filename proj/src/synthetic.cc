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

#include "recallner/synthetic.h"

#include <array>
#include <cstdio>
#include <filesystem>
#include <random>
#include <set>
#include <stdexcept>
#include <string_view>

#include "recallner/digest.h"
#include "recallner/text.h"
#include "recallner/wordpiece.h"

namespace recallner {

namespace {

constexpr std::array<std::string_view, 20> kHeads = {
    "Vex", "Lum", "Cor", "Nov", "Zyr", "Pel", "Kav", "Dro", "Myr", "Tal",
    "Quen", "Sor", "Bri", "Fen", "Gal", "Hax", "Jor", "Wyn", "Ost", "Rel"};
constexpr std::array<std::string_view, 14> kTails = {
    "a", "ion", "ix", "ora", "ex", "ent", "yl", "ava", "ium", "o", "tra",
    "line", "ax", "is"};

constexpr std::array<std::string_view, 15> kNouns = {
    "Infusion Pump", "Catheter", "Patient Monitor", "Stent",
    "Blood Glucose Meter", "Ventilator", "Defibrillator", "Analyzer",
    "Guidewire", "Syringe", "Surgical Stapler", "Pulse Oximeter",
    "Imaging System", "Insulin Pen", "Hip Implant"};

constexpr std::array<std::string_view, 4> kFirmSuffixes = {"Medical", "Health",
                                                           "Systems", "Inc"};
constexpr std::array<std::string_view, 8> kCities = {
    "Boston", "Chicago", "Denver", "Atlanta", "Seattle", "Houston", "Phoenix",
    "Portland"};
constexpr std::array<std::string_view, 6> kMonths = {"January", "March", "May",
                                                     "July", "September",
                                                     "November"};

// {D} device, {F} firm, {C} city, {M} month, {N} number, {L} lot code.
constexpr std::array<std::string_view, 13> kTemplates = {
    "{F} initiated a recall of the {D} on {M} {N}, 2019.",
    "The {D} may stop working because of a software error.",
    "Customers were told to stop using the affected {D} units.",
    "An advisory letter was sent to all customers by certified mail.",
    "{F} will replace each {D} at no charge.",
    "Contact {F} customer service in {C} for more information.",
    "Inspect the {D} for cracks in the housing before use.",
    "Distributors in {C} were notified by phone.",
    "Lot numbers {L} and {L} are affected.",
    "The firm received {N} complaints about the {D} in {C}.",
    "A field correction for the {D} was issued by {F}.",
    "Users should return the {D} to {F} in {C}.",
    "Affected product: {D}, catalog number {L}."};

template <typename C>
std::string_view pick(const C& items, std::mt19937_64& rng) {
  return items[uniform_index(rng, items.size())];
}

std::string lot_code(std::mt19937_64& rng) {
  char buf[16];
  std::snprintf(buf, sizeof(buf), "%c%03zu-%02zu",
                static_cast<char>('A' + uniform_index(rng, 26)),
                uniform_index(rng, 1000), uniform_index(rng, 100));
  return buf;
}

struct DocBuilder {
  std::string text;
  std::vector<AnnotationSpan> spans;

  int pos() const { return static_cast<int>(text::length(text)); }

  void device(std::string_view name) {
    bool first = true;
    for (const Word& w : pre_split(name)) {
      const int base = pos();
      text.append(w.text);
      spans.push_back({base, base + (w.end - w.start),
                       first ? EntityTag::kBegin : EntityTag::kInside});
      first = false;
      // device names are ASCII words joined by single spaces
      if (static_cast<std::size_t>(w.end) < name.size()) text.push_back(' ');
    }
  }
};

}  // namespace

SyntheticCorpus generate_synthetic_corpus(const SyntheticConfig& config) {
  if (config.documents == 0) throw std::invalid_argument("documents must be > 0");
  if (config.min_sentences == 0 || config.max_sentences < config.min_sentences) {
    throw std::invalid_argument("need 1 <= min_sentences <= max_sentences");
  }
  if (config.lexicon_size == 0 ||
      config.lexicon_size > kHeads.size() * kTails.size() * kTails.size() / 2) {
    throw std::invalid_argument("lexicon size out of range");
  }
  std::mt19937_64 rng(config.seed);
  SyntheticCorpus corpus;

  std::set<std::string> trade_words;
  std::vector<std::string> trade_order;
  while (trade_words.size() < config.lexicon_size) {
    std::string w(pick(kHeads, rng));
    w += pick(kTails, rng);
    if (uniform_index(rng, 2) == 0) w += pick(kTails, rng);
    if (trade_words.insert(w).second) trade_order.push_back(w);
  }
  for (const auto& w : trade_order) {
    std::string name = w;
    if (uniform_index(rng, 10) < 7) {
      name += ' ';
      name += pick(kNouns, rng);
    }
    corpus.lexicon.push_back(std::move(name));
  }

  // Firm roots share syllables with trade words but never coincide.
  std::vector<std::string> firms;
  std::set<std::string> firm_roots;
  while (firms.size() < 12) {
    std::string root(pick(kHeads, rng));
    root += pick(kTails, rng);
    if (trade_words.count(root) || !firm_roots.insert(root).second) continue;
    firms.push_back(root + " " + std::string(pick(kFirmSuffixes, rng)));
  }

  for (std::size_t d = 0; d < config.documents; ++d) {
    char id[32];
    std::snprintf(id, sizeof(id), "SYN-%04zu", d + 1);
    const std::string& device = corpus.lexicon[uniform_index(rng, corpus.lexicon.size())];
    const std::string firm(firms[uniform_index(rng, firms.size())]);
    const std::string lot = lot_code(rng);

    DocBuilder doc;
    const std::size_t sentences =
        config.min_sentences +
        uniform_index(rng, config.max_sentences - config.min_sentences + 1);
    for (std::size_t s = 0; s < sentences; ++s) {
      if (s > 0) doc.text.push_back(' ');
      std::string_view tpl = pick(kTemplates, rng);
      for (std::size_t i = 0; i < tpl.size();) {
        if (tpl[i] == '{' && i + 2 < tpl.size() && tpl[i + 2] == '}') {
          switch (tpl[i + 1]) {
            case 'D': doc.device(device); break;
            case 'F': doc.text += firm; break;
            case 'C': doc.text += pick(kCities, rng); break;
            case 'M': doc.text += pick(kMonths, rng); break;
            case 'N': doc.text += std::to_string(1 + uniform_index(rng, 28)); break;
            case 'L': doc.text += lot_code(rng); break;
            default: throw std::logic_error("bad template slot");
          }
          i += 3;
        } else {
          doc.text.push_back(tpl[i++]);
        }
      }
    }
    corpus.records.push_back({id, doc.text, device, device + ", model " + lot});
    corpus.annotations.push_back({id, doc.text, doc.spans});
  }

  for (std::size_t i = 0; i < kNouns.size(); ++i) {
    char code[8];
    std::snprintf(code, sizeof(code), "S%02zu", i);
    corpus.classifications.push_back(
        {code, std::string(kNouns[i]), "General purpose " + std::string(kNouns[i])});
  }

  // Base vocabulary: specials, every ordinary word whole, syllables and single
  // characters as pieces. Trade words, firm roots and anything with a digit
  // stay out so they fragment.
  std::set<std::string> whole;
  for (const auto& rec : corpus.records) {
    for (const Word& w : pre_split(rec.recall_action)) {
      if (trade_words.count(w.text) || firm_roots.count(w.text)) continue;
      bool digit = false;
      for (char c : w.text) digit |= (c >= '0' && c <= '9');
      if (!digit) whole.insert(w.text);
    }
  }
  std::set<std::string> pieces;
  for (auto h : kHeads) pieces.insert(std::string(h));
  for (auto t : kTails) pieces.insert("##" + std::string(t));
  for (char c = 'a'; c <= 'z'; ++c) {
    pieces.insert(std::string(1, c));
    pieces.insert("##" + std::string(1, c));
    pieces.insert(std::string(1, static_cast<char>(c - 'a' + 'A')));
    pieces.insert("##" + std::string(1, static_cast<char>(c - 'a' + 'A')));
  }
  for (char c = '0'; c <= '9'; ++c) {
    pieces.insert(std::string(1, c));
    pieces.insert("##" + std::string(1, c));
  }
  std::vector<std::string> tokens = {std::string(Vocabulary::kPad),
                                     std::string(Vocabulary::kUnk),
                                     std::string(Vocabulary::kCls),
                                     std::string(Vocabulary::kSep)};
  for (const auto& w : whole) tokens.push_back(w);
  for (const auto& p : pieces) {
    if (!whole.count(p)) tokens.push_back(p);
  }
  corpus.base_vocab = Vocabulary::from_tokens(std::move(tokens));
  return corpus;
}

void write_synthetic_corpus(const SyntheticCorpus& corpus,
                            const std::string& dir) {
  std::filesystem::create_directories(dir);
  const std::filesystem::path root(dir);
  write_file((root / "recalls.jsonl").string(), serialize_records(corpus.records));
  write_file((root / "classifications.jsonl").string(),
             serialize_classifications(corpus.classifications));
  write_file((root / "annotations.jsonl").string(),
             serialize_annotations(corpus.annotations));
  save_vocab(corpus.base_vocab, (root / "base_vocab.txt").string());
}

}  // namespace recallner
