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

#ifndef RECALLNER_INGEST_H_
#define RECALLNER_INGEST_H_

#include <chrono>
#include <cstddef>
#include <stdexcept>
#include <string>
#include <vector>

#include "json.hpp"

namespace recallner {

// One device recall action. The recall action text is the corpus unit.
struct RecallRecord {
  std::string cfres_id;
  std::string recall_action;
  std::string device_name;
  std::string product_description;

  bool operator==(const RecallRecord&) const = default;
};

// A row of the device classification dataset; only used as an extra source
// of device vocabulary.
struct ClassificationRecord {
  std::string product_code;
  std::string device_name;
  std::string definition;

  bool operator==(const ClassificationRecord&) const = default;
};

enum class IngestSource { kLiveApi, kFixture };

struct IngestManifest {
  std::size_t record_count = 0;
  IngestSource source = IngestSource::kFixture;
  std::string fetched_at;      // ISO-8601 UTC
  std::string content_digest;  // sha256 of the persisted JSONL bytes
};

class IngestError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct EndpointConfig {
  // Scheme and host, e.g. "https://api.fda.gov" or "http://127.0.0.1:8080".
  std::string base_url = "https://api.fda.gov";
  std::string path = "/device/recall.json";
  // Empty means unauthenticated. See api_key_from_env().
  std::string api_key;
  // Optional openFDA search expression.
  std::string search;
  int page_size = 100;
  int max_attempts = 3;
  std::chrono::milliseconds initial_backoff{500};
  int max_in_flight = 4;
  std::chrono::seconds timeout{30};
  // Raw pages are cached here keyed by request digest. Empty disables caching.
  std::string cache_dir;
};

// Reads OPENFDA_API_KEY; empty string if unset.
std::string api_key_from_env();

// Fetches up to max_records raw result objects, paginating with limit/skip.
// Pages are merged in page order regardless of completion order.
std::vector<nlohmann::json> fetch_results(const EndpointConfig& config,
                                          std::size_t max_records);

std::vector<RecallRecord> fetch_recalls(const EndpointConfig& config,
                                        std::size_t max_records);
std::vector<ClassificationRecord> fetch_classifications(
    const EndpointConfig& config, std::size_t max_records);

// Maps openFDA recall result objects onto RecallRecord. Results without a
// cfres_id are dropped; a missing action becomes empty text.
std::vector<RecallRecord> recalls_from_results(
    const std::vector<nlohmann::json>& results);
std::vector<ClassificationRecord> classifications_from_results(
    const std::vector<nlohmann::json>& results);

// Line-delimited JSON, one record per line.
std::vector<RecallRecord> load_fixture(const std::string& path);
std::vector<RecallRecord> parse_fixture(std::string_view bytes);
std::string serialize_records(const std::vector<RecallRecord>& records);

std::vector<ClassificationRecord> load_classification_fixture(
    const std::string& path);
std::string serialize_classifications(
    const std::vector<ClassificationRecord>& records);

// Drops empty/whitespace-only actions and duplicate actions (NFC +
// whitespace-collapsed equality); first occurrence wins.
std::vector<RecallRecord> filter_records(
    const std::vector<RecallRecord>& records);

// Writes the records as JSONL to out_path and the manifest next to it
// (out_path + ".manifest.json").
IngestManifest persist_records(const std::vector<RecallRecord>& records,
                               IngestSource source,
                               const std::string& out_path);

nlohmann::json manifest_to_json(const IngestManifest& manifest);

}  // namespace recallner

#endif  // RECALLNER_INGEST_H_
