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

#ifndef RECALLNER_PIPELINE_H_
#define RECALLNER_PIPELINE_H_

#include <cstdint>
#include <filesystem>
#include <functional>
#include <optional>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "json.hpp"
#include "recallner/evaluation.h"

namespace recallner {

// Stage names in their natural order. A config may list any subset.
inline const std::vector<std::string> kStageNames = {
    "ingest", "curate", "enrich", "annotate", "align", "train", "eval", "infer"};

// Allowed enrichment fractions for the experiment matrix.
inline constexpr double kAllowedFractions[] = {0.0, 0.25, 0.5, 1.0};

struct ExperimentSpec {
  std::string name;
  double enrich_fraction = 0.5;
  bool kfold = true;
  bool dropout = true;
  uint64_t seed = 0;

  // Directory-safe form of name.
  std::string slug() const;
};

// Raised by run_pipeline when the config does not validate. Exit code 2.
class ConfigError : public std::runtime_error {
 public:
  explicit ConfigError(std::vector<std::string> errors);
  const std::vector<std::string>& errors() const { return errors_; }

 private:
  std::vector<std::string> errors_;
};

// A stage failed; artifacts written so far stay on disk. Exit code 1.
class StageError : public std::runtime_error {
 public:
  StageError(std::string stage, const std::string& what);
  const std::string& stage() const { return stage_; }

 private:
  std::string stage_;
};

// Lint mode: every problem found, empty when the config is usable. Relative
// paths resolve against base_dir.
std::vector<std::string> validate_config(const nlohmann::json& config,
                                         const std::filesystem::path& base_dir);
// Also reports unreadable files and JSON syntax errors.
std::vector<std::string> validate_config_file(const std::string& path);

std::vector<ExperimentSpec> parse_experiments(const nlohmann::json& config,
                                              uint64_t default_seed);

struct PipelineReport {
  std::vector<std::pair<std::string, MetricsReport>> rows;
  std::string table;  // empty when no eval stage ran
};

using PipelineLog = std::function<void(const std::string&)>;

// Runs the declared stages in order under run_dir. Every stage reads only
// artifacts persisted in run_dir by earlier stages, so a run can be resumed
// with a shorter stage list. run_dir/manifest.json lists every artifact with
// its sha256 and is rewritten after each stage.
PipelineReport run_pipeline(const nlohmann::json& config,
                            const std::filesystem::path& base_dir,
                            const std::filesystem::path& run_dir,
                            const PipelineLog& log = {},
                            std::optional<uint64_t> seed_override = {});
PipelineReport run_pipeline(const std::string& config_path,
                            const std::filesystem::path& run_dir,
                            const PipelineLog& log = {},
                            std::optional<uint64_t> seed_override = {});

// Artifact list of run_dir (manifest.json itself excluded), sorted by path.
nlohmann::json build_manifest(const std::filesystem::path& run_dir);

}  // namespace recallner

#endif  // RECALLNER_PIPELINE_H_
