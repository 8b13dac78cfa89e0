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

#ifndef RECALLNER_SYNTHETIC_H_
#define RECALLNER_SYNTHETIC_H_

#include <cstdint>
#include <string>
#include <vector>

#include "recallner/annotation.h"
#include "recallner/ingest.h"
#include "recallner/vocab.h"

namespace recallner {

// Recall-style documents with planted device trade names. Every mention is
// annotated doccano-style: B-DEVICE on the trade word, I-DEVICE on each
// following word of the device name.
struct SyntheticConfig {
  std::size_t documents = 200;
  std::size_t lexicon_size = 50;
  // sentences per document, drawn uniformly from [min, max]
  std::size_t min_sentences = 4;
  std::size_t max_sentences = 7;
  uint64_t seed = 0;
};

struct SyntheticCorpus {
  std::vector<std::string> lexicon;  // full device names
  std::vector<RecallRecord> records;
  std::vector<ClassificationRecord> classifications;
  std::vector<AnnotatedDoc> annotations;
  // Covers every character of the corpus, so nothing maps to [UNK]; trade
  // words are only reachable as subword pieces.
  Vocabulary base_vocab;
};

SyntheticCorpus generate_synthetic_corpus(const SyntheticConfig& config);

// Writes recalls.jsonl, classifications.jsonl, annotations.jsonl and
// base_vocab.txt into dir.
void write_synthetic_corpus(const SyntheticCorpus& corpus,
                            const std::string& dir);

}  // namespace recallner

#endif  // RECALLNER_SYNTHETIC_H_
