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

#include "recallner/pipeline.h"

#include <algorithm>
#include <cmath>
#include <set>
#include <sstream>

#include "recallner/annotation.h"
#include "recallner/checkpoint.h"
#include "recallner/curation.h"
#include "recallner/digest.h"
#include "recallner/inference.h"
#include "recallner/ingest.h"
#include "recallner/trainer.h"
#include "recallner/vocab.h"
#include "recallner/wordpiece.h"

namespace recallner {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

bool allowed_fraction(double f) {
  return std::any_of(std::begin(kAllowedFractions), std::end(kAllowedFractions),
                     [f](double a) { return a == f; });
}

std::string fraction_tag(double f) {
  return std::to_string(static_cast<int>(std::lround(f * 100.0)));
}

bool has_stage(const json& config, const std::string& stage) {
  if (!config.contains("stages") || !config["stages"].is_array()) return false;
  for (const auto& s : config["stages"]) {
    if (s.is_string() && s.get<std::string>() == stage) return true;
  }
  return false;
}

const json& section(const json& config, const std::string& name) {
  static const json empty = json::object();
  auto it = config.find(name);
  return it != config.end() && it->is_object() ? *it : empty;
}

fs::path resolve(const fs::path& base_dir, const std::string& p) {
  fs::path path(p);
  return path.is_absolute() ? path : base_dir / path;
}

void check_path(const json& sec, const std::string& sec_name,
                const std::string& key, bool required,
                const fs::path& base_dir, std::vector<std::string>& errors) {
  const std::string field = sec_name + "." + key;
  auto it = sec.find(key);
  if (it == sec.end()) {
    if (required) errors.push_back(field + ": missing");
    return;
  }
  if (!it->is_string() || it->get<std::string>().empty()) {
    errors.push_back(field + ": must be a non-empty path string");
    return;
  }
  if (!fs::exists(resolve(base_dir, it->get<std::string>()))) {
    errors.push_back(field + ": file not found: " + it->get<std::string>());
  }
}

void check_unsigned(const json& obj, const std::string& field_prefix,
                    const std::string& key, std::vector<std::string>& errors) {
  auto it = obj.find(key);
  if (it != obj.end() && !it->is_number_unsigned()) {
    errors.push_back(field_prefix + key + ": must be a non-negative integer");
  }
}

struct RunContext {
  json config;
  fs::path base_dir;
  fs::path run_dir;
  uint64_t seed = 0;
  std::vector<ExperimentSpec> experiments;
  PipelineLog log;
  PipelineReport report;

  void say(const std::string& line) const {
    if (log) log(line);
  }
  fs::path dir(const std::string& sub) const {
    fs::path p = run_dir / sub;
    fs::create_directories(p);
    return p;
  }
  std::vector<double> fractions() const {
    std::vector<double> out;
    for (const auto& e : experiments) {
      if (std::find(out.begin(), out.end(), e.enrich_fraction) == out.end()) {
        out.push_back(e.enrich_fraction);
      }
    }
    return out;
  }
  fs::path vocab_path(double f) const {
    return run_dir / "enrich" / ("vocab_" + fraction_tag(f) + ".txt");
  }
  fs::path aligned_path(double f) const {
    return run_dir / "align" / ("aligned_" + fraction_tag(f) + ".jsonl");
  }
  fs::path experiment_dir(const ExperimentSpec& e) const {
    return run_dir / "experiments" / e.slug();
  }
};

void require(const fs::path& p) {
  if (!fs::exists(p)) {
    throw std::runtime_error("missing input artifact " + p.string() +
                             " (run the earlier stage first)");
  }
}

void stage_ingest(RunContext& ctx) {
  const json& sec = section(ctx.config, "ingest");
  const std::string source = sec.value("source", "fixture");
  const std::size_t max_records = sec.value("max_records", std::size_t{0});
  std::vector<RecallRecord> recalls;
  std::vector<ClassificationRecord> classes;
  IngestSource kind = IngestSource::kFixture;
  if (source == "live") {
    kind = IngestSource::kLiveApi;
    const json& ep = section(sec, "endpoint");
    EndpointConfig cfg;
    cfg.base_url = ep.value("base_url", cfg.base_url);
    cfg.path = ep.value("path", cfg.path);
    cfg.search = ep.value("search", cfg.search);
    cfg.page_size = ep.value("page_size", cfg.page_size);
    cfg.api_key = api_key_from_env();
    cfg.cache_dir = ep.contains("cache_dir")
                        ? resolve(ctx.base_dir, ep["cache_dir"].get<std::string>()).string()
                        : ctx.dir("ingest/cache").string();
    const std::size_t limit = max_records ? max_records : 1000;
    recalls = fetch_recalls(cfg, limit);
    cfg.path = ep.value("classification_path", "/device/classification.json");
    classes = fetch_classifications(cfg, limit);
  } else {
    recalls = load_fixture(resolve(ctx.base_dir, sec["recalls"].get<std::string>()).string());
    if (sec.contains("classifications")) {
      classes = load_classification_fixture(
          resolve(ctx.base_dir, sec["classifications"].get<std::string>()).string());
    }
    if (max_records && recalls.size() > max_records) recalls.resize(max_records);
  }
  const std::size_t raw = recalls.size();
  recalls = filter_records(recalls);
  const fs::path out = ctx.dir("ingest");
  persist_records(recalls, kind, (out / "recalls.jsonl").string());
  write_file((out / "classifications.jsonl").string(), serialize_classifications(classes));
  ctx.say("ingest: " + std::to_string(raw) + " records, " +
          std::to_string(recalls.size()) + " after filtering, " +
          std::to_string(classes.size()) + " classifications");
}

void stage_curate(RunContext& ctx) {
  const json& sec = section(ctx.config, "curate");
  const fs::path in = ctx.run_dir / "ingest";
  require(in / "recalls.jsonl");
  const auto recalls = load_fixture((in / "recalls.jsonl").string());
  std::vector<ClassificationRecord> classes;
  if (fs::exists(in / "classifications.jsonl")) {
    classes = load_classification_fixture((in / "classifications.jsonl").string());
  }
  const uint64_t seed = sec.value("seed", ctx.seed);
  const auto raw = extract_vocab_candidates(recalls, classes);
  const VocabCandidateSet set = curate_tokens(raw, seed);
  const fs::path out = ctx.dir("curate");
  save_candidates(set, (out / "candidates.txt").string());
  if (sec.contains("annotation_fraction")) {
    std::string lines;
    for (const auto& r : sample_for_annotation(
             recalls, sec["annotation_fraction"].get<double>(), seed)) {
      lines += json{{"id", r.cfres_id}, {"text", r.recall_action}}.dump() + "\n";
    }
    write_file((out / "annotation_sample.jsonl").string(), lines);
  }
  ctx.say("curate: " + std::to_string(raw.size()) + " raw tokens, " +
          std::to_string(set.tokens.size()) + " candidates");
}

void stage_enrich(RunContext& ctx) {
  const json& sec = section(ctx.config, "enrich");
  require(ctx.run_dir / "curate" / "candidates.txt");
  const Vocabulary base =
      load_vocab(resolve(ctx.base_dir, sec["base_vocab"].get<std::string>()).string());
  const VocabCandidateSet candidates =
      load_candidates((ctx.run_dir / "curate" / "candidates.txt").string());
  const OrderStrategy strategy = parse_order_strategy(sec.value("strategy", "shuffle"));
  const uint64_t seed = sec.value("seed", ctx.seed);
  std::vector<std::string> corpus;
  if (fs::exists(ctx.run_dir / "ingest" / "recalls.jsonl")) {
    for (const auto& r : load_fixture((ctx.run_dir / "ingest" / "recalls.jsonl").string())) {
      corpus.push_back(r.recall_action);
    }
  }
  ctx.dir("enrich");
  for (double f : ctx.fractions()) {
    const Vocabulary v = enrich(base, candidates, f, strategy, seed);
    save_vocab(v, ctx.vocab_path(f).string());
    write_file((ctx.run_dir / "enrich" / ("diff_" + fraction_tag(f) + ".json")).string(),
               tokenization_diff(corpus, base, v).to_json()["aggregate"].dump(2) + "\n");
    ctx.say("enrich: " + fraction_tag(f) + "% -> " + std::to_string(v.size()) +
            " tokens (base " + std::to_string(base.size()) + ")");
  }
}

void stage_annotate(RunContext& ctx) {
  const json& sec = section(ctx.config, "annotate");
  const auto docs =
      parse_annotations(resolve(ctx.base_dir, sec["export"].get<std::string>()).string());
  json warnings = json::array();
  for (const auto& d : docs) {
    for (const auto& w : validate_annotation_rules(d)) {
      warnings.push_back({{"doc_id", d.doc_id}, {"span", w.span_index}, {"message", w.message}});
    }
  }
  const fs::path out = ctx.dir("annotate");
  write_file((out / "annotations.jsonl").string(), serialize_annotations(docs));
  write_file((out / "warnings.json").string(), warnings.dump(2) + "\n");
  ctx.say("annotate: " + std::to_string(docs.size()) + " documents, " +
          std::to_string(warnings.size()) + " rule warnings");
}

int align_max_len(const json& config) {
  const json& align = section(config, "align");
  if (align.contains("max_len")) return align["max_len"].get<int>();
  const json& model = section(section(config, "train"), "model");
  return std::min(kDefaultMaxLen, model.value("max_positions", kDefaultMaxLen));
}

void stage_align(RunContext& ctx) {
  const fs::path in = ctx.run_dir / "annotate" / "annotations.jsonl";
  require(in);
  const auto docs = parse_annotations(in.string());
  const int max_len = align_max_len(ctx.config);
  const LabelScheme& scheme = LabelScheme::standard();
  ctx.dir("align");
  for (double f : ctx.fractions()) {
    require(ctx.vocab_path(f));
    const Vocabulary vocab = load_vocab(ctx.vocab_path(f).string());
    std::vector<AlignedExample> examples;
    for (const auto& d : docs) {
      examples.push_back(align(d, tokenize(d.text, vocab, max_len), scheme));
    }
    save_aligned(examples, ctx.aligned_path(f).string());
    std::size_t tokens = 0;
    for (const auto& e : examples) tokens += e.size();
    ctx.say("align: " + fraction_tag(f) + "% -> " + std::to_string(examples.size()) +
            " examples, " + std::to_string(tokens) + " tokens");
  }
}

void stage_train(RunContext& ctx) {
  const TrainConfig base = train_config_from_json(section(ctx.config, "train"));
  for (const auto& exp : ctx.experiments) {
    require(ctx.aligned_path(exp.enrich_fraction));
    require(ctx.vocab_path(exp.enrich_fraction));
    const auto examples = load_aligned(ctx.aligned_path(exp.enrich_fraction).string());
    const Vocabulary vocab = load_vocab(ctx.vocab_path(exp.enrich_fraction).string());
    TrainConfig cfg = base;
    cfg.model.vocab_size = vocab.size();
    if (!exp.dropout) cfg.model.dropout_rate = 0.0;
    cfg.use_kfold = exp.kfold;
    cfg.seed = exp.seed;
    cfg.model.seed = exp.seed;
    ctx.say("train: " + exp.name);
    const TrainResult result =
        cross_validate(examples, cfg, [&](const std::string& l) { ctx.say("  " + l); });

    const fs::path out = ctx.experiment_dir(exp);
    fs::create_directories(out);
    json folds = json::array();
    for (const auto& f : result.folds) {
      json epochs = json::array();
      for (const auto& e : f.epochs) {
        epochs.push_back({{"epoch", e.epoch},
                          {"mean_loss", e.mean_loss},
                          {"validation", e.validation.to_json()}});
      }
      folds.push_back({{"fold", f.fold_index},
                       {"best_epoch", f.best_epoch},
                       {"best", f.best.to_json()},
                       {"epochs", epochs}});
      const std::string i = std::to_string(f.fold_index);
      save_label_sequences(f.gold, (out / ("gold_" + i + ".jsonl")).string());
      save_label_sequences(f.predictions, (out / ("pred_" + i + ".jsonl")).string());
    }
    const FoldResult& best = result.folds[result.best_fold()];
    save_checkpoint({best.best_params, cfg.seed, best.best_step},
                    (out / "model.ckpt").string());
    json summary = {{"experiment",
                     {{"name", exp.name},
                      {"enrich_fraction", exp.enrich_fraction},
                      {"regularization", {{"kfold", exp.kfold}, {"dropout", exp.dropout}}},
                      {"seed", exp.seed}}},
                    {"config", to_json(cfg)},
                    {"vocab", fs::relative(ctx.vocab_path(exp.enrich_fraction), ctx.run_dir).generic_string()},
                    {"best_fold", best.fold_index},
                    {"folds", folds},
                    {"averaged", result.averaged.to_json()}};
    write_file((out / "train.json").string(), summary.dump(2) + "\n");
    ctx.say("train: " + exp.name + " averaged F1 " + std::to_string(result.averaged.f1));
  }
}

void stage_eval(RunContext& ctx) {
  json rows = json::array();
  ctx.report.rows.clear();
  for (const auto& exp : ctx.experiments) {
    const fs::path dir = ctx.experiment_dir(exp);
    require(dir / "train.json");
    const json train = json::parse(read_file((dir / "train.json").string()));
    std::vector<MetricsReport> folds;
    for (const auto& f : train["folds"]) {
      const std::string i = std::to_string(f["fold"].get<int>());
      folds.push_back(score_documents(
          load_label_sequences((dir / ("gold_" + i + ".jsonl")).string()),
          load_label_sequences((dir / ("pred_" + i + ".jsonl")).string())));
    }
    MetricsReport avg = average_folds(folds);
    write_file((dir / "metrics.json").string(), avg.to_json().dump(2) + "\n");
    rows.push_back({{"name", exp.name},
                    {"experiment", exp.slug()},
                    {"precision", avg.precision},
                    {"recall", avg.recall},
                    {"f1", avg.f1}});
    ctx.report.rows.emplace_back(exp.name, std::move(avg));
  }
  ctx.report.table = format_table(ctx.report.rows);
  write_file((ctx.run_dir / "report.json").string(),
             json{{"rows", rows}}.dump(2) + "\n");
  write_file((ctx.run_dir / "report.txt").string(), ctx.report.table);
  ctx.say("eval:\n" + ctx.report.table);
}

void stage_infer(RunContext& ctx) {
  const json& sec = section(ctx.config, "infer");
  require(ctx.run_dir / "report.json");
  const json report = json::parse(read_file((ctx.run_dir / "report.json").string()));
  if (report["rows"].empty()) throw std::runtime_error("report has no experiments");
  const json* best = &report["rows"][0];
  for (const auto& row : report["rows"]) {
    if (row["f1"].get<double>() > (*best)["f1"].get<double>()) best = &row;
  }
  const fs::path dir = ctx.run_dir / "experiments" / (*best)["experiment"].get<std::string>();
  const json train = json::parse(read_file((dir / "train.json").string()));
  const Checkpoint ckpt = load_checkpoint((dir / "model.ckpt").string());
  const Vocabulary vocab =
      load_vocab((ctx.run_dir / train["vocab"].get<std::string>()).string());
  const double threshold = sec.value("threshold", kDefaultThreshold);
  const auto preds = predict(ckpt.params, vocab, sec["text"].get<std::string>());
  const auto kept = filter_predictions(preds, threshold);
  std::string lines;
  for (const auto& p : kept) lines += format_report_line(p) + "\n";
  const fs::path out = ctx.dir("infer");
  write_file((out / "report.txt").string(), lines);
  json js = report_json(kept, threshold);
  js["experiment"] = (*best)["name"];
  write_file((out / "report.json").string(), js.dump(2) + "\n");
  ctx.say("infer: " + (*best)["name"].get<std::string>() + ", " +
          std::to_string(kept.size()) + " tokens above " + std::to_string(threshold));
}

void write_manifest(const RunContext& ctx, const std::vector<std::string>& done) {
  json m = {{"config_sha256", sha256_hex(ctx.config.dump())},
            {"seed", ctx.seed},
            {"stages", done},
            {"artifacts", build_manifest(ctx.run_dir)}};
  write_file((ctx.run_dir / "manifest.json").string(), m.dump(2) + "\n");
}

}  // namespace

std::string ExperimentSpec::slug() const {
  std::string out;
  for (char c : name) {
    const bool keep = (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') ||
                      (c >= '0' && c <= '9') || c == '-' || c == '_';
    out.push_back(keep ? c : '_');
  }
  return out;
}

ConfigError::ConfigError(std::vector<std::string> errors)
    : std::runtime_error([&] {
        std::string msg = "invalid config:";
        for (const auto& e : errors) msg += "\n  " + e;
        return msg;
      }()),
      errors_(std::move(errors)) {}

StageError::StageError(std::string stage, const std::string& what)
    : std::runtime_error("stage " + stage + " failed: " + what),
      stage_(std::move(stage)) {}

std::vector<ExperimentSpec> parse_experiments(const json& config,
                                              uint64_t default_seed) {
  std::vector<ExperimentSpec> out;
  if (!config.contains("experiments")) return out;
  for (const auto& e : config["experiments"]) {
    ExperimentSpec spec;
    spec.name = e.at("name").get<std::string>();
    spec.enrich_fraction = e.at("enrich_fraction").get<double>();
    const json& reg = section(e, "regularization");
    spec.kfold = reg.value("kfold", true);
    spec.dropout = reg.value("dropout", true);
    spec.seed = e.value("seed", default_seed);
    out.push_back(std::move(spec));
  }
  return out;
}

std::vector<std::string> validate_config(const json& config,
                                         const fs::path& base_dir) {
  std::vector<std::string> errors;
  if (!config.is_object()) return {"config: must be a JSON object"};

  if (!config.contains("stages")) {
    errors.push_back("stages: missing");
  } else if (!config["stages"].is_array()) {
    errors.push_back("stages: must be an array");
  } else {
    std::set<std::string> seen;
    for (const auto& s : config["stages"]) {
      if (!s.is_string()) {
        errors.push_back("stages: entries must be strings");
        continue;
      }
      const auto name = s.get<std::string>();
      if (std::find(kStageNames.begin(), kStageNames.end(), name) == kStageNames.end()) {
        errors.push_back("stages: unknown stage '" + name + "'");
      } else if (!seen.insert(name).second) {
        errors.push_back("stages: duplicate stage '" + name + "'");
      }
    }
  }
  check_unsigned(config, "", "seed", errors);

  bool needs_experiments = false;
  for (const char* s : {"enrich", "align", "train", "eval", "infer"}) {
    needs_experiments |= has_stage(config, s);
  }
  if (config.contains("experiments")) {
    const json& exps = config["experiments"];
    if (!exps.is_array()) {
      errors.push_back("experiments: must be an array");
    } else {
      std::set<std::string> names;
      std::set<std::string> slugs;
      for (std::size_t i = 0; i < exps.size(); ++i) {
        const std::string p = "experiments[" + std::to_string(i) + "].";
        const json& e = exps[i];
        if (!e.is_object()) {
          errors.push_back(p.substr(0, p.size() - 1) + ": must be an object");
          continue;
        }
        if (!e.contains("name") || !e["name"].is_string() ||
            e["name"].get<std::string>().empty()) {
          errors.push_back(p + "name: missing or empty");
        } else {
          ExperimentSpec tmp;
          tmp.name = e["name"].get<std::string>();
          if (!names.insert(tmp.name).second) {
            errors.push_back(p + "name: duplicate '" + tmp.name + "'");
          } else if (!slugs.insert(tmp.slug()).second) {
            errors.push_back(p + "name: '" + tmp.name +
                             "' collides with another name as a directory");
          }
        }
        if (!e.contains("enrich_fraction")) {
          errors.push_back(p + "enrich_fraction: missing");
        } else if (!e["enrich_fraction"].is_number() ||
                   !allowed_fraction(e["enrich_fraction"].get<double>())) {
          errors.push_back(p + "enrich_fraction: " + e["enrich_fraction"].dump() +
                           " is not one of 0, 0.25, 0.5, 1.0");
        }
        if (e.contains("regularization")) {
          const json& reg = e["regularization"];
          if (!reg.is_object()) {
            errors.push_back(p + "regularization: must be an object");
          } else {
            for (const char* k : {"kfold", "dropout"}) {
              if (reg.contains(k) && !reg[k].is_boolean()) {
                errors.push_back(p + "regularization." + k + ": must be a boolean");
              }
            }
          }
        }
        check_unsigned(e, p, "seed", errors);
      }
      if (needs_experiments && exps.empty()) {
        errors.push_back("experiments: at least one experiment is required");
      }
    }
  } else if (needs_experiments) {
    errors.push_back("experiments: missing");
  }

  if (has_stage(config, "ingest")) {
    const json& sec = section(config, "ingest");
    const std::string source = sec.value("source", "fixture");
    if (source == "fixture") {
      check_path(sec, "ingest", "recalls", true, base_dir, errors);
      check_path(sec, "ingest", "classifications", false, base_dir, errors);
    } else if (source != "live") {
      errors.push_back("ingest.source: must be 'fixture' or 'live'");
    }
    check_unsigned(sec, "ingest.", "max_records", errors);
  }
  if (has_stage(config, "curate")) {
    const json& sec = section(config, "curate");
    check_unsigned(sec, "curate.", "seed", errors);
    if (sec.contains("annotation_fraction")) {
      const json& f = sec["annotation_fraction"];
      if (!f.is_number() || !(f.get<double>() > 0.0 && f.get<double>() <= 1.0)) {
        errors.push_back("curate.annotation_fraction: must be in (0, 1]");
      }
    }
  }
  if (has_stage(config, "enrich")) {
    const json& sec = section(config, "enrich");
    check_path(sec, "enrich", "base_vocab", true, base_dir, errors);
    check_unsigned(sec, "enrich.", "seed", errors);
    if (sec.contains("strategy")) {
      try {
        parse_order_strategy(sec["strategy"].get<std::string>());
      } catch (const std::exception&) {
        errors.push_back("enrich.strategy: must be shuffle, fifo or length_desc");
      }
    }
  }
  if (has_stage(config, "annotate")) {
    check_path(section(config, "annotate"), "annotate", "export", true, base_dir, errors);
  }
  if (has_stage(config, "align")) {
    const json& sec = section(config, "align");
    if (sec.contains("max_len") &&
        (!sec["max_len"].is_number_integer() || sec["max_len"].get<int>() < 2)) {
      errors.push_back("align.max_len: must be an integer >= 2");
    }
  }
  if (has_stage(config, "train")) {
    try {
      TrainConfig cfg = train_config_from_json(section(config, "train"));
      cfg.model.vocab_size = 1;  // filled in from the vocabulary at run time
      cfg.validate();
      if (has_stage(config, "align") && align_max_len(config) > cfg.model.max_positions) {
        errors.push_back("align.max_len: exceeds train.model.max_positions");
      }
    } catch (const std::exception& e) {
      errors.push_back(std::string("train: ") + e.what());
    }
  }
  if (has_stage(config, "infer")) {
    const json& sec = section(config, "infer");
    if (!sec.contains("text") || !sec["text"].is_string() ||
        sec["text"].get<std::string>().empty()) {
      errors.push_back("infer.text: missing or empty");
    }
    if (sec.contains("threshold")) {
      const json& t = sec["threshold"];
      if (!t.is_number() || !(t.get<double>() >= 0.0 && t.get<double>() <= 1.0)) {
        errors.push_back("infer.threshold: must be in [0, 1]");
      }
    }
  }
  return errors;
}

std::vector<std::string> validate_config_file(const std::string& path) {
  if (!fs::exists(path)) return {"config: file not found: " + path};
  json config;
  try {
    config = json::parse(read_file(path));
  } catch (const std::exception& e) {
    return {std::string("config: ") + e.what()};
  }
  return validate_config(config, fs::path(path).parent_path());
}

json build_manifest(const fs::path& run_dir) {
  std::vector<std::string> paths;
  if (fs::exists(run_dir)) {
    for (const auto& entry : fs::recursive_directory_iterator(run_dir)) {
      if (!entry.is_regular_file()) continue;
      const std::string rel = fs::relative(entry.path(), run_dir).generic_string();
      if (rel != "manifest.json") paths.push_back(rel);
    }
  }
  std::sort(paths.begin(), paths.end());
  json out = json::array();
  for (const auto& rel : paths) {
    const fs::path p = run_dir / rel;
    const bool stamped = rel.ends_with(".manifest.json");
    std::string digest;
    if (stamped) {
      // ingest manifests carry a wall-clock stamp; hash the rest
      json m = json::parse(read_file(p.string()));
      m.erase("fetched_at");
      digest = sha256_hex(m.dump());
    } else {
      digest = sha256_file(p.string());
    }
    json entry = {{"path", rel}, {"sha256", digest}};
    if (stamped) entry["sha256_excludes"] = {"fetched_at"};
    else entry["bytes"] = fs::file_size(p);
    out.push_back(std::move(entry));
  }
  return out;
}

PipelineReport run_pipeline(const json& config, const fs::path& base_dir,
                            const fs::path& run_dir, const PipelineLog& log,
                            std::optional<uint64_t> seed_override) {
  if (auto errors = validate_config(config, base_dir); !errors.empty()) {
    throw ConfigError(std::move(errors));
  }
  RunContext ctx;
  ctx.config = config;
  ctx.base_dir = base_dir;
  ctx.run_dir = run_dir;
  ctx.seed = seed_override ? *seed_override : config.value("seed", uint64_t{0});
  if (seed_override) ctx.config["seed"] = *seed_override;
  ctx.experiments = parse_experiments(config, ctx.seed);
  ctx.log = log;
  fs::create_directories(run_dir);

  using StageFn = void (*)(RunContext&);
  const std::vector<std::pair<std::string, StageFn>> table = {
      {"ingest", stage_ingest}, {"curate", stage_curate}, {"enrich", stage_enrich},
      {"annotate", stage_annotate}, {"align", stage_align}, {"train", stage_train},
      {"eval", stage_eval}, {"infer", stage_infer}};
  std::vector<std::string> done;
  for (const auto& s : config["stages"]) {
    const std::string name = s.get<std::string>();
    const auto it = std::find_if(table.begin(), table.end(),
                                 [&](const auto& p) { return p.first == name; });
    try {
      it->second(ctx);
    } catch (const std::exception& e) {
      write_manifest(ctx, done);
      throw StageError(name, e.what());
    }
    done.push_back(name);
    write_manifest(ctx, done);
  }
  if (done.empty()) write_manifest(ctx, done);
  return ctx.report;
}

PipelineReport run_pipeline(const std::string& config_path, const fs::path& run_dir,
                            const PipelineLog& log,
                            std::optional<uint64_t> seed_override) {
  if (auto errors = validate_config_file(config_path); !errors.empty()) {
    throw ConfigError(std::move(errors));
  }
  const json config = json::parse(read_file(config_path));
  return run_pipeline(config, fs::path(config_path).parent_path(), run_dir, log,
                      seed_override);
}

}  // namespace recallner
