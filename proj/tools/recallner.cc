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

// recallner: one subcommand per pipeline stage, plus `run --config`.
// Exit codes: 0 ok, 1 stage/runtime error, 2 config or usage error.

#include <filesystem>
#include <iostream>
#include <optional>
#include <string>

#include "CLI11.hpp"
#include "json.hpp"
#include "recallner/annotation.h"
#include "recallner/checkpoint.h"
#include "recallner/curation.h"
#include "recallner/digest.h"
#include "recallner/inference.h"
#include "recallner/ingest.h"
#include "recallner/pipeline.h"
#include "recallner/synthetic.h"
#include "recallner/trainer.h"
#include "recallner/vocab.h"
#include "recallner/wordpiece.h"

namespace fs = std::filesystem;
using nlohmann::json;
using namespace recallner;

namespace {

constexpr int kExitStage = 1;
constexpr int kExitConfig = 2;

struct Globals {
  std::optional<uint64_t> seed;
  std::string out_dir;

  uint64_t seed_or(uint64_t fallback) const { return seed.value_or(fallback); }
  // Explicit path wins; otherwise name under --out-dir; otherwise fallback.
  std::string out_path(const std::string& explicit_path, const std::string& name,
                       const std::string& fallback) const {
    if (!explicit_path.empty()) return explicit_path;
    if (!out_dir.empty()) {
      fs::create_directories(out_dir);
      return (fs::path(out_dir) / name).string();
    }
    return fallback;
  }
};

// A --text value naming an existing file is read from disk.
std::string text_arg(const std::string& value) {
  std::error_code ec;
  if (value.size() < 4096 && fs::is_regular_file(value, ec)) return read_file(value);
  return value;
}

void ensure_parent(const std::string& path) {
  const fs::path parent = fs::path(path).parent_path();
  if (!parent.empty()) fs::create_directories(parent);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Device-recall NER pipeline"};
  app.require_subcommand(1);
  Globals g;
  app.add_option("--seed", g.seed, "Seed for every randomized step");
  app.add_option("--out-dir", g.out_dir, "Directory for outputs");

  // synth
  auto* synth = app.add_subcommand("synth", "Generate a synthetic annotated corpus");
  SyntheticConfig synth_cfg;
  std::string synth_out;
  synth->add_option("--documents", synth_cfg.documents)->capture_default_str();
  synth->add_option("--lexicon", synth_cfg.lexicon_size)->capture_default_str();
  synth->add_option("--min-sentences", synth_cfg.min_sentences)->capture_default_str();
  synth->add_option("--max-sentences", synth_cfg.max_sentences)->capture_default_str();
  synth->add_option("--out", synth_out, "Output directory");

  // ingest
  auto* ingest = app.add_subcommand("ingest", "Fetch or load recall records");
  std::string ingest_source = "fixture", ingest_fixture, ingest_classes, ingest_out,
              ingest_cache, ingest_base_url;
  std::size_t ingest_max = 0;
  ingest->add_option("--source", ingest_source)
      ->check(CLI::IsMember({"live", "fixture"}))
      ->capture_default_str();
  ingest->add_option("--fixture", ingest_fixture, "Recall JSONL (fixture source)");
  ingest->add_option("--classifications", ingest_classes,
                     "Classification JSONL to copy alongside");
  ingest->add_option("--max", ingest_max, "Record limit, 0 = all");
  ingest->add_option("--out", ingest_out, "Output JSONL");
  ingest->add_option("--cache-dir", ingest_cache, "Raw page cache (live source)");
  ingest->add_option("--base-url", ingest_base_url, "API base URL (live source)");

  // curate
  auto* curate = app.add_subcommand("curate", "Build the vocabulary candidate set");
  std::string curate_in, curate_classes, curate_out, curate_sample_out;
  double curate_sample = 0.0;
  curate->add_option("--in", curate_in, "Recall JSONL")->required();
  curate->add_option("--classifications", curate_classes);
  curate->add_option("--out", curate_out, "Candidate file");
  curate->add_option("--sample-fraction", curate_sample,
                     "Also write an annotation sample of this fraction");
  curate->add_option("--sample-out", curate_sample_out);

  // enrich
  auto* enrich_cmd = app.add_subcommand("enrich", "Append candidates to a vocabulary");
  std::string enrich_base, enrich_candidates, enrich_strategy = "shuffle", enrich_out;
  double enrich_fraction = 0.5;
  enrich_cmd->add_option("--base", enrich_base)->required();
  enrich_cmd->add_option("--candidates", enrich_candidates)->required();
  enrich_cmd->add_option("--fraction", enrich_fraction)->capture_default_str();
  enrich_cmd->add_option("--strategy", enrich_strategy)
      ->check(CLI::IsMember({"shuffle", "fifo", "length_desc"}))
      ->capture_default_str();
  enrich_cmd->add_option("--out", enrich_out);

  // tokenize
  auto* tok_cmd = app.add_subcommand("tokenize", "Print WordPiece tokens");
  std::string tok_vocab, tok_text;
  int tok_max_len = kDefaultMaxLen;
  bool tok_ids = false;
  tok_cmd->add_option("--vocab", tok_vocab)->required();
  tok_cmd->add_option("--text", tok_text, "String or file")->required();
  tok_cmd->add_option("--max-len", tok_max_len)->capture_default_str();
  tok_cmd->add_flag("--ids", tok_ids, "Print ids instead of tokens");

  // diff
  auto* diff_cmd = app.add_subcommand("diff", "Compare tokenization under two vocabularies");
  std::string diff_a, diff_b, diff_corpus;
  diff_cmd->add_option("--vocab-a", diff_a)->required();
  diff_cmd->add_option("--vocab-b", diff_b)->required();
  diff_cmd->add_option("--corpus", diff_corpus, "Recall JSONL")->required();

  // align
  auto* align_cmd = app.add_subcommand("align", "Convert span annotations to token labels");
  std::string align_ann, align_vocab, align_out;
  int align_max_len = kDefaultMaxLen;
  align_cmd->add_option("--annotations", align_ann)->required();
  align_cmd->add_option("--vocab", align_vocab)->required();
  align_cmd->add_option("--out", align_out);
  align_cmd->add_option("--max-len", align_max_len)->capture_default_str();

  // train
  auto* train_cmd = app.add_subcommand("train", "K-fold training");
  std::string train_data, train_vocab, train_config, train_out;
  std::optional<std::size_t> train_k, train_batch;
  std::optional<int> train_epochs;
  bool train_split = false;
  train_cmd->add_option("--data", train_data, "Aligned JSONL")->required();
  train_cmd->add_option("--vocab", train_vocab)->required();
  train_cmd->add_option("--config", train_config, "Training config JSON");
  train_cmd->add_option("--k", train_k);
  train_cmd->add_option("--epochs", train_epochs);
  train_cmd->add_option("--batch-size", train_batch);
  train_cmd->add_flag("--split", train_split, "Single train/test split instead of K folds");
  train_cmd->add_option("--out", train_out, "Checkpoint directory");

  // eval
  auto* eval_cmd = app.add_subcommand("eval", "Entity-level precision, recall, F1");
  std::string eval_pred, eval_gold, eval_out;
  eval_cmd->add_option("--pred", eval_pred)->required();
  eval_cmd->add_option("--gold", eval_gold)->required();
  eval_cmd->add_option("--out", eval_out, "Metrics JSON");

  // infer
  auto* infer_cmd = app.add_subcommand("infer", "Label device tokens above a confidence");
  std::string infer_ckpt, infer_vocab, infer_text;
  double infer_threshold = kDefaultThreshold;
  bool infer_json = false;
  infer_cmd->add_option("--ckpt", infer_ckpt)->required();
  infer_cmd->add_option("--vocab", infer_vocab)->required();
  infer_cmd->add_option("--text", infer_text, "String or file")->required();
  infer_cmd->add_option("--threshold", infer_threshold)->capture_default_str();
  infer_cmd->add_flag("--json", infer_json);

  // run / validate-config
  auto* run_cmd = app.add_subcommand("run", "Run a pipeline config");
  std::string run_config;
  run_cmd->add_option("--config", run_config)->required();
  auto* lint_cmd = app.add_subcommand("validate-config", "Check a pipeline config");
  std::string lint_config;
  lint_cmd->add_option("--config", lint_config)->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kExitConfig;
  }

  try {
    if (*synth) {
      synth_cfg.seed = g.seed_or(0);
      const std::string dir =
          !synth_out.empty() ? synth_out : (!g.out_dir.empty() ? g.out_dir : "synthetic");
      const SyntheticCorpus corpus = generate_synthetic_corpus(synth_cfg);
      write_synthetic_corpus(corpus, dir);
      std::cout << corpus.records.size() << " documents, " << corpus.lexicon.size()
                << " device names, base vocabulary " << corpus.base_vocab.size()
                << " tokens -> " << dir << "\n";
    } else if (*ingest) {
      std::vector<RecallRecord> records;
      IngestSource source = IngestSource::kFixture;
      if (ingest_source == "live") {
        source = IngestSource::kLiveApi;
        EndpointConfig cfg;
        if (!ingest_base_url.empty()) cfg.base_url = ingest_base_url;
        cfg.api_key = api_key_from_env();
        cfg.cache_dir = ingest_cache;
        records = fetch_recalls(cfg, ingest_max ? ingest_max : 1000);
      } else {
        if (ingest_fixture.empty()) throw std::invalid_argument("--fixture is required");
        records = load_fixture(ingest_fixture);
        if (ingest_max && records.size() > ingest_max) records.resize(ingest_max);
      }
      const std::size_t raw = records.size();
      records = filter_records(records);
      const std::string out = g.out_path(ingest_out, "recalls.jsonl", "recalls.jsonl");
      ensure_parent(out);
      const IngestManifest m = persist_records(records, source, out);
      if (!ingest_classes.empty()) {
        write_file((fs::path(out).parent_path() / "classifications.jsonl").string(),
                   serialize_classifications(load_classification_fixture(ingest_classes)));
      }
      std::cout << raw << " records read, " << m.record_count << " kept -> " << out
                << "\n";
    } else if (*curate) {
      const auto records = load_fixture(curate_in);
      std::vector<ClassificationRecord> classes;
      if (!curate_classes.empty()) classes = load_classification_fixture(curate_classes);
      const uint64_t seed = g.seed_or(0);
      const auto raw = extract_vocab_candidates(records, classes);
      const VocabCandidateSet set = curate_tokens(raw, seed);
      const std::string out = g.out_path(curate_out, "candidates.txt", "candidates.txt");
      ensure_parent(out);
      save_candidates(set, out);
      std::cout << raw.size() << " raw tokens, " << set.tokens.size()
                << " candidates -> " << out << "\n";
      if (curate_sample > 0.0) {
        std::string lines;
        for (const auto& r : sample_for_annotation(records, curate_sample, seed)) {
          lines += json{{"id", r.cfres_id}, {"text", r.recall_action}}.dump() + "\n";
        }
        const std::string sample =
            g.out_path(curate_sample_out, "annotation_sample.jsonl", "annotation_sample.jsonl");
        ensure_parent(sample);
        write_file(sample, lines);
      }
    } else if (*enrich_cmd) {
      const Vocabulary base = load_vocab(enrich_base);
      const Vocabulary v = enrich(base, load_candidates(enrich_candidates), enrich_fraction,
                                  parse_order_strategy(enrich_strategy), g.seed_or(0));
      const std::string out = g.out_path(enrich_out, "vocab.txt", "vocab.txt");
      ensure_parent(out);
      save_vocab(v, out);
      std::cout << base.size() << " -> " << v.size() << " tokens -> " << out << "\n";
    } else if (*tok_cmd) {
      const Tokenization t = tokenize(text_arg(tok_text), load_vocab(tok_vocab), tok_max_len);
      for (std::size_t i = 0; i < t.size(); ++i) {
        if (i) std::cout << ' ';
        if (tok_ids) std::cout << t.ids[i];
        else std::cout << t.tokens[i];
      }
      std::cout << "\n";
    } else if (*diff_cmd) {
      std::vector<std::string> corpus;
      for (const auto& r : load_fixture(diff_corpus)) corpus.push_back(r.recall_action);
      const DiffReport report =
          tokenization_diff(corpus, load_vocab(diff_a), load_vocab(diff_b));
      std::cout << report.to_json().dump(2) << "\n";
    } else if (*align_cmd) {
      const Vocabulary vocab = load_vocab(align_vocab);
      const LabelScheme& scheme = LabelScheme::standard();
      std::vector<AlignedExample> examples;
      std::size_t warnings = 0;
      for (const auto& doc : parse_annotations(align_ann)) {
        for (const auto& w : validate_annotation_rules(doc)) {
          std::cerr << doc.doc_id << ": " << w.message << "\n";
          ++warnings;
        }
        examples.push_back(align(doc, tokenize(doc.text, vocab, align_max_len), scheme));
      }
      const std::string out = g.out_path(align_out, "aligned.jsonl", "aligned.jsonl");
      ensure_parent(out);
      save_aligned(examples, out);
      std::cout << examples.size() << " examples, " << warnings << " rule warnings -> "
                << out << "\n";
    } else if (*train_cmd) {
      TrainConfig cfg;
      if (!train_config.empty()) cfg = train_config_from_json(json::parse(read_file(train_config)));
      if (train_k) cfg.k = *train_k;
      if (train_epochs) cfg.epochs = *train_epochs;
      if (train_batch) cfg.batch_size = *train_batch;
      if (train_split) cfg.use_kfold = false;
      if (g.seed) cfg.seed = cfg.model.seed = *g.seed;
      const Vocabulary vocab = load_vocab(train_vocab);
      cfg.model.vocab_size = vocab.size();
      const auto examples = load_aligned(train_data);
      const TrainResult result =
          cross_validate(examples, cfg, [](const std::string& l) { std::cerr << l << "\n"; });
      const fs::path out = g.out_path(train_out, "checkpoints", "checkpoints");
      fs::create_directories(out);
      json folds = json::array();
      for (const auto& f : result.folds) {
        const std::string i = std::to_string(f.fold_index);
        save_checkpoint({f.best_params, cfg.seed, f.best_step},
                        (out / ("fold_" + i + ".ckpt")).string());
        save_label_sequences(f.gold, (out / ("gold_" + i + ".jsonl")).string());
        save_label_sequences(f.predictions, (out / ("pred_" + i + ".jsonl")).string());
        folds.push_back({{"fold", f.fold_index}, {"best_epoch", f.best_epoch},
                         {"best", f.best.to_json()}});
      }
      const FoldResult& best = result.folds[result.best_fold()];
      save_checkpoint({best.best_params, cfg.seed, best.best_step},
                      (out / "model.ckpt").string());
      write_file((out / "metrics.json").string(),
                 json{{"config", to_json(cfg)},
                      {"folds", folds},
                      {"best_fold", best.fold_index},
                      {"averaged", result.averaged.to_json()}}
                         .dump(2) + "\n");
      std::cout << format_table({{"averaged", result.averaged}});
    } else if (*eval_cmd) {
      const MetricsReport m = score_documents(load_label_sequences(eval_gold),
                                              load_label_sequences(eval_pred));
      if (!eval_out.empty() || !g.out_dir.empty()) {
        const std::string out = g.out_path(eval_out, "metrics.json", "metrics.json");
        ensure_parent(out);
        write_file(out, m.to_json().dump(2) + "\n");
      }
      std::cout << format_table({{"model", m}});
    } else if (*infer_cmd) {
      const Checkpoint ckpt = load_checkpoint(infer_ckpt);
      const auto preds = predict(ckpt.params, load_vocab(infer_vocab), text_arg(infer_text));
      const auto kept = filter_predictions(preds, infer_threshold);
      if (infer_json) {
        std::cout << report_json(kept, infer_threshold).dump(2) << "\n";
      } else {
        for (const auto& p : kept) std::cout << format_report_line(p) << "\n";
      }
    } else if (*run_cmd) {
      const std::string out =
          !g.out_dir.empty() ? g.out_dir
                             : (fs::path("runs") / fs::path(run_config).stem()).string();
      const PipelineReport report = run_pipeline(
          run_config, out, [](const std::string& l) { std::cerr << l << "\n"; }, g.seed);
      std::cout << report.table;
      std::cout << "run directory: " << out << "\n";
    } else if (*lint_cmd) {
      const auto errors = validate_config_file(lint_config);
      for (const auto& e : errors) std::cerr << e << "\n";
      if (!errors.empty()) return kExitConfig;
      std::cout << "ok\n";
    }
  } catch (const ConfigError& e) {
    std::cerr << e.what() << "\n";
    return kExitConfig;
  } catch (const StageError& e) {
    std::cerr << e.what() << "\n";
    return kExitStage;
  } catch (const std::invalid_argument& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitConfig;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitStage;
  }
  return 0;
}
