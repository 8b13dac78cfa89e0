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


#include <atomic>
#include <chrono>
#include <filesystem>
#include <thread>

#include "doctest.h"
#include "httplib.h"
#include "json.hpp"
#include "recallner/digest.h"
#include "recallner/ingest.h"
#include "test_util.h"

using namespace recallner;
using nlohmann::json;

namespace {

// Local stand-in for the recall endpoint: `total` records served by
// limit/skip, with optional scripted failures.
class FakeApi {
 public:
  explicit FakeApi(std::size_t total) : total_(total) {
    server_.Get("/device/recall.json", [this](const httplib::Request& req,
                                              httplib::Response& res) {
      ++requests_;
      if (fail_next_ > 0) {
        --fail_next_;
        res.status = fail_status_;
        res.set_content("{}", "application/json");
        return;
      }
      if (malformed_) {
        res.set_content("{\"results\": [", "application/json");
        return;
      }
      const std::size_t limit = std::stoul(req.get_param_value("limit"));
      const std::size_t skip = std::stoul(req.get_param_value("skip"));
      json results = json::array();
      for (std::size_t i = skip; i < std::min(total_, skip + limit); ++i) {
        results.push_back({{"cfres_id", std::to_string(1000 + i)},
                           {"action", "Action text " + std::to_string(i)},
                           {"product_description", "Widget " + std::to_string(i)},
                           {"openfda", {{"device_name", json::array({"Pump", "Infusion"})}}}});
      }
      json body = {{"meta", {{"results", {{"skip", skip}, {"limit", limit}, {"total", total_}}}}},
                   {"results", results}};
      res.set_content(body.dump(), "application/json");
    });
    port_ = server_.bind_to_any_port("127.0.0.1");
    thread_ = std::thread([this] { server_.listen_after_bind(); });
    server_.wait_until_ready();
  }
  ~FakeApi() { stop(); }

  void stop() {
    server_.stop();
    if (thread_.joinable()) thread_.join();
  }
  EndpointConfig config() const {
    EndpointConfig c;
    c.base_url = "http://127.0.0.1:" + std::to_string(port_);
    c.page_size = 2;
    c.initial_backoff = std::chrono::milliseconds(1);
    c.timeout = std::chrono::seconds(5);
    return c;
  }
  void fail(int times, int status) {
    fail_next_ = times;
    fail_status_ = status;
  }
  void set_malformed(bool m) { malformed_ = m; }
  int requests() const { return requests_; }

 private:
  std::size_t total_;
  httplib::Server server_;
  std::thread thread_;
  int port_ = 0;
  std::atomic<int> requests_{0};
  std::atomic<int> fail_next_{0};
  std::atomic<int> fail_status_{200};
  std::atomic<bool> malformed_{false};
};

RecallRecord rec(std::string id, std::string action) {
  return {std::move(id), std::move(action), "", ""};
}

}  // namespace

TEST_CASE("fetch: 3 pages x 2 records come back in page order") {
  FakeApi api(6);
  const auto records = fetch_recalls(api.config(), 100);
  REQUIRE(records.size() == 6);
  for (std::size_t i = 0; i < 6; ++i) {
    CHECK(records[i].cfres_id == std::to_string(1000 + i));
    CHECK(records[i].recall_action == "Action text " + std::to_string(i));
  }
  CHECK(records[0].device_name == "Pump Infusion");
  CHECK(records[0].product_description == "Widget 0");
  CHECK(api.requests() == 3);
}

TEST_CASE("fetch: max_records bounds the result and max_records=0 is empty") {
  FakeApi api(6);
  CHECK(fetch_recalls(api.config(), 3).size() == 3);
  CHECK(fetch_recalls(api.config(), 0).empty());

  TempDir tmp("ingest-empty");
  const IngestManifest m =
      persist_records(fetch_recalls(api.config(), 0), IngestSource::kLiveApi, tmp.file("r.jsonl"));
  CHECK(m.record_count == 0);
  CHECK(manifest_to_json(m)["source"] == "live-api");
}

TEST_CASE("fetch: rate limit is retried with backoff") {
  FakeApi api(2);
  api.fail(2, 429);
  const auto records = fetch_recalls(api.config(), 10);
  CHECK(records.size() == 2);
  CHECK(api.requests() == 3);
}

TEST_CASE("fetch: persistent 5xx gives up after bounded attempts") {
  FakeApi api(2);
  api.fail(100, 503);
  CHECK_THROWS_AS(fetch_recalls(api.config(), 10), IngestError);
  CHECK(api.requests() == 3);
}

TEST_CASE("fetch: non-retryable status and malformed payload are errors") {
  FakeApi api(2);
  api.fail(1, 404);
  CHECK_THROWS_AS(fetch_recalls(api.config(), 10), IngestError);
  CHECK(api.requests() == 1);
  api.set_malformed(true);
  CHECK_THROWS_AS(fetch_recalls(api.config(), 10), IngestError);
}

TEST_CASE("fetch: transport failure is an error") {
  EndpointConfig c;
  c.base_url = "http://127.0.0.1:1";
  c.max_attempts = 2;
  c.initial_backoff = std::chrono::milliseconds(1);
  c.timeout = std::chrono::seconds(2);
  CHECK_THROWS_AS(fetch_recalls(c, 5), IngestError);
  c.page_size = 0;
  CHECK_THROWS_AS(fetch_recalls(c, 5), std::invalid_argument);
}

TEST_CASE("fetch: cached pages replay offline") {
  TempDir tmp("ingest-cache");
  std::vector<RecallRecord> online;
  EndpointConfig cfg;
  {
    FakeApi api(5);
    cfg = api.config();
    cfg.cache_dir = tmp.file("cache");
    online = fetch_recalls(cfg, 100);
    api.stop();
  }
  REQUIRE(online.size() == 5);
  CHECK(std::distance(std::filesystem::directory_iterator(cfg.cache_dir),
                      std::filesystem::directory_iterator{}) == 3);
  const auto offline = fetch_recalls(cfg, 100);
  CHECK(offline == online);
}

TEST_CASE("fixture loading") {
  const auto records = load_fixture(fixture("recalls_sample.jsonl"));
  REQUIRE(records.size() == 10);
  CHECK(records.front().cfres_id == "180001");
  CHECK(records.back().cfres_id == "180010");
  CHECK(records[4].recall_action.empty());

  CHECK(parse_fixture("").empty());
  CHECK(parse_fixture("\n\n").empty());
  const auto dup = parse_fixture(
      "{\"cfres_id\":\"1\",\"recall_action\":\"a\"}\n{\"cfres_id\":\"1\",\"recall_action\":\"a\"}\n");
  CHECK(dup.size() == 2);

  CHECK_THROWS_AS(parse_fixture("{\"recall_action\":\"a\"}"), IngestError);
  CHECK_THROWS_AS(parse_fixture("{\"cfres_id\":\"1\"}"), IngestError);
  CHECK_THROWS_AS(parse_fixture("not json"), IngestError);
  CHECK_THROWS_AS(load_fixture(fixture("does_not_exist.jsonl")), IngestError);
}

TEST_CASE("fixture bytes round trip and match the fetch path") {
  const auto records = load_fixture(fixture("recalls_sample.jsonl"));
  CHECK(parse_fixture(serialize_records(records)) == records);
  CHECK(parse_fixture(read_file(fixture("recalls_sample.jsonl"))) == records);

  FakeApi api(4);
  const auto fetched = fetch_recalls(api.config(), 100);
  CHECK(parse_fixture(serialize_records(fetched)) == fetched);
}

TEST_CASE("filter_records examples") {
  CHECK(filter_records({}).empty());
  auto two = filter_records({rec("1", "same"), rec("2", "same")});
  REQUIRE(two.size() == 1);
  CHECK(two[0].cfres_id == "1");

  const std::vector<RecallRecord> five = {rec("1", "alpha"), rec("2", "beta"), rec("3", "alpha"),
                                          rec("4", "  \t"), rec("5", "gamma")};
  const auto out = filter_records(five);
  REQUIRE(out.size() == 3);
  CHECK(out[0].cfres_id == "1");
  CHECK(out[1].cfres_id == "2");
  CHECK(out[2].cfres_id == "5");
}

TEST_CASE("filter_records keys on NFC and collapsed whitespace") {
  const auto out = filter_records({rec("1", "caf\xC3\xA9  recall"), rec("2", "cafe\xCC\x81 recall"),
                                   rec("3", " caf\xC3\xA9 recall\n")});
  REQUIRE(out.size() == 1);
  CHECK(out[0].recall_action == "caf\xC3\xA9  recall");
}

TEST_CASE("filter_records properties on the sample fixture") {
  const auto records = load_fixture(fixture("recalls_sample.jsonl"));
  const auto once = filter_records(records);
  CHECK(once.size() == 7);
  CHECK(filter_records(once) == once);
  for (const auto& r : once) {
    CHECK(std::find(records.begin(), records.end(), r) != records.end());
  }
}

TEST_CASE("persist_records writes a manifest with a stable digest") {
  TempDir tmp("ingest-persist");
  const auto records = filter_records(load_fixture(fixture("recalls_sample.jsonl")));
  const IngestManifest a = persist_records(records, IngestSource::kFixture, tmp.file("a.jsonl"));
  const IngestManifest b = persist_records(records, IngestSource::kFixture, tmp.file("b.jsonl"));
  CHECK(a.record_count == records.size());
  CHECK(a.content_digest == b.content_digest);
  CHECK(a.content_digest == sha256_file(tmp.file("a.jsonl")));
  const json m = json::parse(read_file(tmp.file("a.jsonl.manifest.json")));
  CHECK(m["record_count"] == records.size());
  CHECK(m["source"] == "fixture");
  CHECK(m["fetched_at"].get<std::string>().size() == 20);
  CHECK(load_fixture(tmp.file("a.jsonl")) == records);
}

TEST_CASE("classification fixture") {
  const auto classes = load_classification_fixture(fixture("classifications_sample.jsonl"));
  REQUIRE(classes.size() == 3);
  CHECK(classes[0].product_code == "FRN");
  CHECK(classes[0].device_name == "Pump, Infusion");
  const auto from_api = classifications_from_results(
      {json{{"product_code", "X"}, {"device_name", "Stent"}, {"definition", "d"}}});
  CHECK(from_api == std::vector<ClassificationRecord>{{"X", "Stent", "d"}});
}
