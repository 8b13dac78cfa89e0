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

#include "recallner/evaluation.h"

#include <algorithm>
#include <cstdio>
#include <iterator>
#include <sstream>
#include <stdexcept>

#include "recallner/annotation.h"
#include "recallner/digest.h"
#include "recallner/text.h"

namespace recallner {

namespace {

constexpr int kOutside = 0;
constexpr int kBegin = 1;

double percent(std::size_t num, std::size_t den) {
  return den == 0 ? 0.0 : 100.0 * static_cast<double>(num) /
                              static_cast<double>(den);
}

double harmonic(double p, double r) {
  return p + r == 0.0 ? 0.0 : 2.0 * p * r / (p + r);
}

std::string fixed2(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.2f", v);
  return buf;
}

}  // namespace

nlohmann::json MetricsReport::to_json() const {
  nlohmann::json out = {{"tp", tp},
                        {"fp", fp},
                        {"fn", fn},
                        {"precision", precision},
                        {"recall", recall},
                        {"f1", f1},
                        {"averaged", averaged}};
  if (!per_fold.empty()) {
    nlohmann::json folds = nlohmann::json::array();
    for (const auto& f : per_fold) folds.push_back(f.to_json());
    out["per_fold"] = folds;
  }
  return out;
}

std::vector<EntitySpan> extract_entities(const std::vector<int>& labels,
                                         const std::string& doc_id) {
  std::vector<EntitySpan> spans;
  int open = -1;
  auto close = [&](int end) {
    if (open >= 0) spans.push_back({open, end, doc_id});
    open = -1;
  };
  for (std::size_t i = 0; i < labels.size(); ++i) {
    const int pos = static_cast<int>(i);
    const int label = labels[i];
    if (label == kOutside || label == LabelScheme::kIgnore) {
      close(pos);
    } else if (label == kBegin) {
      close(pos);
      open = pos;
    } else if (open < 0) {
      open = pos;
    }
  }
  close(static_cast<int>(labels.size()));
  return spans;
}

MetricsReport metrics_from_counts(std::size_t tp, std::size_t fp,
                                  std::size_t fn) {
  MetricsReport r;
  r.tp = tp;
  r.fp = fp;
  r.fn = fn;
  r.precision = percent(tp, tp + fp);
  r.recall = percent(tp, tp + fn);
  r.f1 = harmonic(r.precision, r.recall);
  return r;
}

MetricsReport prf1(const std::vector<EntitySpan>& pred,
                   const std::vector<EntitySpan>& gold) {
  std::vector<EntitySpan> p = pred;
  std::vector<EntitySpan> g = gold;
  std::sort(p.begin(), p.end());
  p.erase(std::unique(p.begin(), p.end()), p.end());
  std::sort(g.begin(), g.end());
  g.erase(std::unique(g.begin(), g.end()), g.end());
  std::vector<EntitySpan> common;
  std::set_intersection(p.begin(), p.end(), g.begin(), g.end(),
                        std::back_inserter(common));
  return metrics_from_counts(common.size(), p.size() - common.size(),
                             g.size() - common.size());
}

MetricsReport average_folds(const std::vector<MetricsReport>& reports) {
  if (reports.empty()) throw std::invalid_argument("no fold reports to average");
  MetricsReport avg;
  for (const auto& r : reports) {
    avg.tp += r.tp;
    avg.fp += r.fp;
    avg.fn += r.fn;
    avg.precision += r.precision;
    avg.recall += r.recall;
    avg.f1 += r.f1;
  }
  const double n = static_cast<double>(reports.size());
  avg.precision /= n;
  avg.recall /= n;
  avg.f1 /= n;
  avg.per_fold = reports;
  avg.averaged = true;
  return avg;
}

MetricsReport score_documents(const std::vector<LabelSequence>& gold,
                              const std::vector<LabelSequence>& pred) {
  if (gold.size() != pred.size()) {
    throw std::invalid_argument("gold and prediction document counts differ");
  }
  std::vector<EntitySpan> gold_spans;
  std::vector<EntitySpan> pred_spans;
  for (std::size_t i = 0; i < gold.size(); ++i) {
    if (gold[i].doc_id != pred[i].doc_id ||
        gold[i].labels.size() != pred[i].labels.size()) {
      throw std::invalid_argument("document " + gold[i].doc_id +
                                  " does not line up with its prediction");
    }
    // Index-qualified ids keep duplicate doc ids apart.
    const std::string key = std::to_string(i) + ":" + gold[i].doc_id;
    for (auto& s : extract_entities(gold[i].labels, key)) gold_spans.push_back(s);
    for (auto& s : extract_entities(pred[i].labels, key)) pred_spans.push_back(s);
  }
  return prf1(pred_spans, gold_spans);
}

std::vector<LabelSequence> load_label_sequences(const std::string& path) {
  const LabelScheme& scheme = LabelScheme::standard();
  std::vector<LabelSequence> out;
  for (const auto& line : text::read_lines(path)) {
    if (line.empty()) continue;
    auto obj = nlohmann::json::parse(line);
    LabelSequence seq;
    seq.doc_id = obj.at("doc_id").get<std::string>();
    for (const auto& v : obj.at("labels")) {
      int id;
      if (v.is_string()) {
        auto parsed = scheme.id(v.get<std::string>());
        if (!parsed) {
          throw std::invalid_argument("unknown label " + v.get<std::string>());
        }
        id = *parsed;
      } else {
        id = v.get<int>();
      }
      if (id == LabelScheme::kIgnore) continue;
      if (!scheme.valid(id)) {
        throw std::invalid_argument("label id out of range in " + path);
      }
      seq.labels.push_back(id);
    }
    out.push_back(std::move(seq));
  }
  return out;
}

void save_label_sequences(const std::vector<LabelSequence>& seqs,
                          const std::string& path) {
  std::string out;
  for (const auto& s : seqs) {
    out += nlohmann::json{{"doc_id", s.doc_id}, {"labels", s.labels}}.dump();
    out += '\n';
  }
  write_file(path, out);
}

std::string format_table(
    const std::vector<std::pair<std::string, MetricsReport>>& rows) {
  std::size_t name_width = 5;
  for (const auto& [name, _] : rows) name_width = std::max(name_width, name.size());
  auto pad = [](const std::string& s, std::size_t w, bool right) {
    std::string fill(w > s.size() ? w - s.size() : 0, ' ');
    return right ? fill + s : s + fill;
  };
  const std::size_t col = 14;
  std::ostringstream out;
  out << pad("Model", name_width, false) << " | "
      << pad("Precision (%)", col, true) << " | " << pad("Recall (%)", col, true)
      << " | " << pad("F1 Score (%)", col, true) << "\n";
  out << std::string(name_width, '-') << "-+-" << std::string(col, '-') << "-+-"
      << std::string(col, '-') << "-+-" << std::string(col, '-') << "\n";
  for (const auto& [name, r] : rows) {
    out << pad(name, name_width, false) << " | "
        << pad(fixed2(r.precision), col, true) << " | "
        << pad(fixed2(r.recall), col, true) << " | "
        << pad(fixed2(r.f1), col, true) << "\n";
  }
  return out.str();
}

}  // namespace recallner
