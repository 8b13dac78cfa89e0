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

#include "recallner/ingest.h"

#include <algorithm>
#include <cstdlib>
#include <ctime>
#include <filesystem>
#include <future>
#include <sstream>
#include <thread>
#include <unordered_set>

#include "httplib.h"
#include "recallner/digest.h"
#include "recallner/text.h"

namespace recallner {

namespace {

using nlohmann::json;

struct PageRequest {
  std::size_t skip = 0;
  std::size_t limit = 0;
};

// Canonical request string; doubles as the cache key. The api key is left
// out so cached pages replay regardless of credentials.
std::string request_key(const EndpointConfig& config, const PageRequest& page) {
  std::ostringstream key;
  key << config.base_url << config.path << "?limit=" << page.limit
      << "&skip=" << page.skip;
  if (!config.search.empty()) key << "&search=" << config.search;
  return key.str();
}

std::string cache_path(const EndpointConfig& config, const PageRequest& page) {
  return (std::filesystem::path(config.cache_dir) /
          (sha256_hex(request_key(config, page)) + ".json"))
      .string();
}

bool retryable_status(int status) { return status == 429 || status >= 500; }

std::string fetch_page_body(const EndpointConfig& config,
                            const PageRequest& page) {
  if (!config.cache_dir.empty()) {
    std::string cached = cache_path(config, page);
    if (std::filesystem::exists(cached)) return read_file(cached);
  }

  httplib::Params params{{"limit", std::to_string(page.limit)},
                         {"skip", std::to_string(page.skip)}};
  if (!config.search.empty()) params.emplace("search", config.search);
  if (!config.api_key.empty()) params.emplace("api_key", config.api_key);

  std::string last_error;
  auto backoff = config.initial_backoff;
  for (int attempt = 1; attempt <= std::max(1, config.max_attempts);
       ++attempt) {
    if (attempt > 1) {
      std::this_thread::sleep_for(backoff);
      backoff *= 2;
    }
    httplib::Client client(config.base_url);
    client.set_connection_timeout(config.timeout);
    client.set_read_timeout(config.timeout);
    auto result = client.Get(config.path, params, httplib::Headers{});
    if (!result) {
      last_error = "transport failure: " + httplib::to_string(result.error());
      continue;
    }
    if (retryable_status(result->status)) {
      last_error = (result->status == 429 ? "rate limited" : "server error") +
                   std::string(" (HTTP ") + std::to_string(result->status) +
                   ")";
      continue;
    }
    if (result->status < 200 || result->status >= 300) {
      throw IngestError("HTTP " + std::to_string(result->status) + " for " +
                        request_key(config, page));
    }
    if (!config.cache_dir.empty() && json::accept(result->body)) {
      std::filesystem::create_directories(config.cache_dir);
      write_file(cache_path(config, page), result->body);
    }
    return result->body;
  }
  throw IngestError(last_error + " after " +
                    std::to_string(config.max_attempts) + " attempts for " +
                    request_key(config, page));
}

struct Page {
  std::vector<json> results;
  std::size_t total = 0;
};

Page parse_page(const std::string& body) {
  json doc = json::parse(body, nullptr, /*allow_exceptions=*/false);
  if (doc.is_discarded() || !doc.is_object()) {
    throw IngestError("malformed JSON payload");
  }
  auto it = doc.find("results");
  if (it == doc.end() || !it->is_array()) {
    throw IngestError("malformed JSON payload: no results array");
  }
  Page page;
  page.results = it->get<std::vector<json>>();
  page.total = page.results.size();
  if (doc.contains("meta")) {
    const json& meta = doc["meta"];
    if (meta.contains("results") && meta["results"].contains("total") &&
        meta["results"]["total"].is_number_unsigned()) {
      page.total = meta["results"]["total"].get<std::size_t>();
    }
  }
  return page;
}

std::string string_field(const json& obj, const char* key) {
  auto it = obj.find(key);
  if (it == obj.end() || it->is_null()) return {};
  if (it->is_string()) return it->get<std::string>();
  if (it->is_array()) {
    // openfda.* fields arrive as arrays of strings.
    std::string joined;
    for (const auto& v : *it) {
      if (!v.is_string()) continue;
      if (!joined.empty()) joined += ' ';
      joined += v.get<std::string>();
    }
    return joined;
  }
  return it->dump();
}

std::string now_iso8601() {
  std::time_t now = std::time(nullptr);
  std::tm tm{};
  gmtime_r(&now, &tm);
  char buf[32];
  std::strftime(buf, sizeof(buf), "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

template <typename Record, typename FromJson>
std::vector<Record> parse_jsonl(std::string_view bytes, FromJson from_json) {
  std::vector<Record> records;
  std::size_t line_no = 0;
  std::size_t pos = 0;
  while (pos < bytes.size()) {
    std::size_t end = bytes.find('\n', pos);
    if (end == std::string_view::npos) end = bytes.size();
    std::string_view line = bytes.substr(pos, end - pos);
    pos = end + 1;
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    if (line.find_first_not_of(" \t") == std::string_view::npos) continue;
    json obj = json::parse(line, nullptr, /*allow_exceptions=*/false);
    if (obj.is_discarded() || !obj.is_object()) {
      throw IngestError("line " + std::to_string(line_no) + ": not a JSON object");
    }
    records.push_back(from_json(obj, line_no));
  }
  return records;
}

std::string required_string(const json& obj, const char* key,
                            std::size_t line_no) {
  auto it = obj.find(key);
  if (it == obj.end() || !it->is_string()) {
    throw IngestError("line " + std::to_string(line_no) +
                      ": schema mismatch, missing string field '" + key + "'");
  }
  return it->get<std::string>();
}

}  // namespace

std::string api_key_from_env() {
  const char* key = std::getenv("OPENFDA_API_KEY");
  return key ? std::string(key) : std::string();
}

std::vector<json> fetch_results(const EndpointConfig& config,
                                std::size_t max_records) {
  if (config.page_size < 1) {
    throw std::invalid_argument("page size must be >= 1");
  }
  std::vector<json> out;
  if (max_records == 0) return out;

  const std::size_t page_size = static_cast<std::size_t>(config.page_size);
  PageRequest first{0, std::min(page_size, max_records)};
  Page head = parse_page(fetch_page_body(config, first));
  const std::size_t wanted = std::min(max_records, head.total);
  for (auto& r : head.results) {
    if (out.size() == wanted) break;
    out.push_back(std::move(r));
  }
  if (head.results.size() < first.limit) return out;

  std::vector<PageRequest> rest;
  for (std::size_t skip = first.limit; skip < wanted; skip += page_size) {
    rest.push_back({skip, std::min(page_size, wanted - skip)});
  }

  const std::size_t in_flight =
      static_cast<std::size_t>(std::max(1, config.max_in_flight));
  for (std::size_t wave = 0; wave < rest.size(); wave += in_flight) {
    std::vector<std::future<Page>> pending;
    for (std::size_t i = wave; i < std::min(rest.size(), wave + in_flight);
         ++i) {
      pending.push_back(std::async(std::launch::async, [&config, req = rest[i]] {
        return parse_page(fetch_page_body(config, req));
      }));
    }
    bool short_page = false;
    for (std::size_t i = 0; i < pending.size(); ++i) {
      Page page = pending[i].get();
      if (short_page) continue;
      for (auto& r : page.results) {
        if (out.size() == wanted) break;
        out.push_back(std::move(r));
      }
      if (page.results.size() < rest[wave + i].limit) short_page = true;
    }
    if (short_page || out.size() == wanted) break;
  }
  return out;
}

std::vector<RecallRecord> recalls_from_results(const std::vector<json>& results) {
  std::vector<RecallRecord> records;
  records.reserve(results.size());
  for (const json& r : results) {
    if (!r.is_object()) continue;
    RecallRecord rec;
    rec.cfres_id = string_field(r, "cfres_id");
    if (rec.cfres_id.empty()) continue;
    rec.recall_action = string_field(r, "action");
    rec.product_description = string_field(r, "product_description");
    if (r.contains("openfda") && r["openfda"].is_object()) {
      rec.device_name = string_field(r["openfda"], "device_name");
    }
    records.push_back(std::move(rec));
  }
  return records;
}

std::vector<ClassificationRecord> classifications_from_results(
    const std::vector<json>& results) {
  std::vector<ClassificationRecord> records;
  for (const json& r : results) {
    if (!r.is_object()) continue;
    records.push_back({string_field(r, "product_code"),
                       string_field(r, "device_name"),
                       string_field(r, "definition")});
  }
  return records;
}

std::vector<RecallRecord> fetch_recalls(const EndpointConfig& config,
                                        std::size_t max_records) {
  return recalls_from_results(fetch_results(config, max_records));
}

std::vector<ClassificationRecord> fetch_classifications(
    const EndpointConfig& config, std::size_t max_records) {
  return classifications_from_results(fetch_results(config, max_records));
}

std::vector<RecallRecord> parse_fixture(std::string_view bytes) {
  return parse_jsonl<RecallRecord>(bytes, [](const json& obj,
                                             std::size_t line_no) {
    RecallRecord rec;
    rec.cfres_id = required_string(obj, "cfres_id", line_no);
    if (rec.cfres_id.empty()) {
      throw IngestError("line " + std::to_string(line_no) + ": empty cfres_id");
    }
    rec.recall_action = required_string(obj, "recall_action", line_no);
    rec.device_name = string_field(obj, "device_name");
    rec.product_description = string_field(obj, "product_description");
    return rec;
  });
}

std::vector<RecallRecord> load_fixture(const std::string& path) {
  if (!std::filesystem::exists(path)) {
    throw IngestError("fixture not found: " + path);
  }
  return parse_fixture(read_file(path));
}

std::string serialize_records(const std::vector<RecallRecord>& records) {
  std::string out;
  for (const auto& r : records) {
    json obj = {{"cfres_id", r.cfres_id},
                {"recall_action", r.recall_action},
                {"device_name", r.device_name},
                {"product_description", r.product_description}};
    out += obj.dump();
    out += '\n';
  }
  return out;
}

std::vector<ClassificationRecord> load_classification_fixture(
    const std::string& path) {
  if (!std::filesystem::exists(path)) {
    throw IngestError("fixture not found: " + path);
  }
  return parse_jsonl<ClassificationRecord>(
      read_file(path), [](const json& obj, std::size_t line_no) {
        ClassificationRecord rec;
        rec.device_name = required_string(obj, "device_name", line_no);
        rec.product_code = string_field(obj, "product_code");
        rec.definition = string_field(obj, "definition");
        return rec;
      });
}

std::string serialize_classifications(
    const std::vector<ClassificationRecord>& records) {
  std::string out;
  for (const auto& r : records) {
    json obj = {{"product_code", r.product_code},
                {"device_name", r.device_name},
                {"definition", r.definition}};
    out += obj.dump();
    out += '\n';
  }
  return out;
}

std::vector<RecallRecord> filter_records(
    const std::vector<RecallRecord>& records) {
  std::vector<RecallRecord> out;
  std::unordered_set<std::string> seen;
  for (const auto& r : records) {
    std::string key = text::collapse_whitespace(text::nfc(r.recall_action));
    if (key.empty()) continue;
    if (!seen.insert(std::move(key)).second) continue;
    out.push_back(r);
  }
  return out;
}

nlohmann::json manifest_to_json(const IngestManifest& manifest) {
  return {{"record_count", manifest.record_count},
          {"source", manifest.source == IngestSource::kLiveApi ? "live-api"
                                                               : "fixture"},
          {"fetched_at", manifest.fetched_at},
          {"content_digest", manifest.content_digest}};
}

IngestManifest persist_records(const std::vector<RecallRecord>& records,
                               IngestSource source,
                               const std::string& out_path) {
  std::string bytes = serialize_records(records);
  write_file(out_path, bytes);
  IngestManifest manifest;
  manifest.record_count = records.size();
  manifest.source = source;
  manifest.fetched_at = now_iso8601();
  manifest.content_digest = sha256_hex(bytes);
  write_file(out_path + ".manifest.json",
             manifest_to_json(manifest).dump(2) + "\n");
  return manifest;
}

}  // namespace recallner
