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


#include <algorithm>
#include <random>
#include <set>

#include "doctest.h"
#include "recallner/digest.h"
#include "recallner/evaluation.h"
#include "test_util.h"

using namespace recallner;

namespace {

constexpr int O = 0, B = 1, I = 2, OD = 3;

std::vector<std::pair<int, int>> bounds(const std::vector<EntitySpan>& spans) {
  std::vector<std::pair<int, int>> out;
  for (const auto& s : spans) out.emplace_back(s.start_token, s.end_token);
  return out;
}

}  // namespace

TEST_CASE("extract_entities examples") {
  CHECK(bounds(extract_entities({B, I, O, B})) == std::vector<std::pair<int, int>>{{0, 2}, {3, 4}});
  CHECK(bounds(extract_entities({B, OD, I})) == std::vector<std::pair<int, int>>{{0, 3}});
  CHECK(extract_entities({O, O, O}).empty());
  CHECK(extract_entities({}).empty());
  CHECK(bounds(extract_entities({I, I, O, OD})) == std::vector<std::pair<int, int>>{{0, 2}, {3, 4}});
  CHECK(bounds(extract_entities({B, B, I})) == std::vector<std::pair<int, int>>{{0, 1}, {1, 3}});
  CHECK(extract_entities({B}, "doc")[0].doc_id == "doc");
}

TEST_CASE("relabeling decoded spans is idempotent") {
  std::mt19937_64 rng(5);
  for (int trial = 0; trial < 500; ++trial) {
    std::vector<int> labels(rng() % 20);
    for (auto& l : labels) l = static_cast<int>(rng() % 4);
    const auto spans = extract_entities(labels);
    std::vector<int> relabeled(labels.size(), O);
    for (const auto& s : spans) {
      relabeled[s.start_token] = B;
      for (int i = s.start_token + 1; i < s.end_token; ++i) relabeled[i] = I;
    }
    CHECK(extract_entities(relabeled) == spans);
  }
}

TEST_CASE("prf1 examples") {
  const std::vector<EntitySpan> gold = {{0, 2, "a"}, {4, 5, "a"}};
  const auto perfect = prf1(gold, gold);
  CHECK(perfect.precision == 100.0);
  CHECK(perfect.recall == 100.0);
  CHECK(perfect.f1 == 100.0);

  const auto half = prf1({{0, 2, "a"}, {3, 4, "a"}}, gold);
  CHECK(half.tp == 1);
  CHECK(half.fp == 1);
  CHECK(half.fn == 1);
  CHECK(half.precision == 50.0);
  CHECK(half.recall == 50.0);
  CHECK(half.f1 == 50.0);

  const auto none = prf1({}, gold);
  CHECK(none.precision == 0.0);
  CHECK(none.recall == 0.0);
  CHECK(none.f1 == 0.0);

  // same bounds in another document do not match
  CHECK(prf1({{0, 2, "b"}}, {{0, 2, "a"}}).tp == 0);
}

TEST_CASE("average_folds") {
  auto with_p = [](double p) {
    MetricsReport r;
    r.precision = p;
    return r;
  };
  CHECK(average_folds({with_p(80), with_p(90)}).precision == 85.0);
  const auto single = metrics_from_counts(3, 1, 2);
  const auto avg = average_folds({single});
  CHECK(avg.precision == single.precision);
  CHECK(avg.recall == single.recall);
  CHECK(avg.f1 == single.f1);
  CHECK(avg.averaged);
  CHECK(avg.per_fold.size() == 1);

  std::vector<MetricsReport> five;
  const double ps[] = {70, 75.5, 81, 90, 100};
  const double fs[] = {60, 65, 70, 72.25, 99};
  for (int i = 0; i < 5; ++i) {
    MetricsReport r;
    r.precision = ps[i];
    r.recall = 50;
    r.f1 = fs[i];
    r.tp = 1;
    five.push_back(r);
  }
  const auto m = average_folds(five);
  CHECK(m.precision == doctest::Approx((70 + 75.5 + 81 + 90 + 100) / 5.0).epsilon(1e-14));
  CHECK(m.f1 == doctest::Approx((60 + 65 + 70 + 72.25 + 99) / 5.0).epsilon(1e-14));
  CHECK(m.recall == 50.0);
  CHECK(m.tp == 5);
  CHECK_THROWS_AS(average_folds({}), std::invalid_argument);
}

TEST_CASE("score_documents and label files") {
  const std::vector<LabelSequence> gold = {{"d1", {B, I, O}}, {"d2", {O, B}}};
  const std::vector<LabelSequence> pred = {{"d1", {B, I, O}}, {"d2", {O, O}}};
  const auto r = score_documents(gold, pred);
  CHECK(r.tp == 1);
  CHECK(r.fn == 1);
  CHECK(r.fp == 0);
  CHECK_THROWS_AS(score_documents(gold, {pred[0]}), std::invalid_argument);
  CHECK_THROWS_AS(score_documents(gold, {pred[0], {"d3", {O, O}}}), std::invalid_argument);
  CHECK_THROWS_AS(score_documents(gold, {pred[0], {"d2", {O}}}), std::invalid_argument);

  TempDir tmp("eval");
  save_label_sequences(gold, tmp.file("g.jsonl"));
  const auto back = load_label_sequences(tmp.file("g.jsonl"));
  REQUIRE(back.size() == 2);
  CHECK(back[1].labels == gold[1].labels);

  write_file(tmp.file("names.jsonl"),
             "{\"doc_id\":\"x\",\"labels\":[\"B-DEVICE\",-100,\"I-DEVICE\",\"O\",\"O-DEVICE\"]}\n");
  CHECK(load_label_sequences(tmp.file("names.jsonl"))[0].labels == std::vector<int>{B, I, O, OD});
  write_file(tmp.file("bad.jsonl"), "{\"doc_id\":\"x\",\"labels\":[\"B-DRUG\"]}\n");
  CHECK_THROWS_AS(load_label_sequences(tmp.file("bad.jsonl")), std::invalid_argument);
}

TEST_CASE("format_table") {
  auto row = [](double p, double r, double f) {
    MetricsReport m;
    m.precision = p;
    m.recall = r;
    m.f1 = f;
    return m;
  };
  const std::string table =
      format_table({{"TinyTagger (Reg only)", row(81.234, 79.5, 80.3549)}, {"x", row(0, 0, 0)}});
  CHECK(table ==
        "Model                 |  Precision (%) |     Recall (%) |   F1 Score (%)\n"
        "----------------------+----------------+----------------+---------------\n"
        "TinyTagger (Reg only) |          81.23 |          79.50 |          80.35\n"
        "x                     |           0.00 |           0.00 |           0.00\n");
}

TEST_CASE("metrics json") {
  const auto avg = average_folds({metrics_from_counts(1, 1, 0), metrics_from_counts(2, 0, 0)});
  const auto j = avg.to_json();
  CHECK(j["averaged"] == true);
  CHECK(j["per_fold"].size() == 2);
  CHECK(j["tp"] == 3);
}
