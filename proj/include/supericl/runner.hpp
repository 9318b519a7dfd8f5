// Copyright 2026 The SuperICL Harness Authors.
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

// Experiment configuration and orchestration: single runs, multi-seed
// tables, example-count sweeps and the ablation grid.

#pragma once

#include <cstdint>
#include <filesystem>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "supericl/error.hpp"
#include "supericl/eval.hpp"
#include "supericl/llm.hpp"
#include "supericl/oracle.hpp"
#include "supericl/plugin.hpp"
#include "supericl/prompt.hpp"
#include "supericl/task.hpp"

namespace sicl {

enum class Mode { SuperICL, ICL, PluginOnly };

std::string_view to_string(Mode mode) noexcept;
Mode mode_from_string(std::string_view name);

struct DatasetRef {
  std::filesystem::path path;
  DatasetFormat format = DatasetFormat::Jsonl;
};

struct PluginConfig {
  PluginSpec spec;
  std::filesystem::path predictions_path;  // PredictionsFile
  std::string url;                         // HttpClassifier origin, e.g. http://127.0.0.1:8000
  double mock_target_accuracy = 0.8;       // CalibratedMock
  ConfidenceProfile mock_profile = ConfidenceProfile::NoisyCalibrated;
  std::uint64_t mock_seed = 0;
};

enum class BackendKind { Http, GoldOracle, EchoPluginOracle, ThresholdOracle };

std::string_view to_string(BackendKind kind) noexcept;
BackendKind backend_kind_from_string(std::string_view name);

struct BackendConfig {
  BackendKind kind = BackendKind::EchoPluginOracle;
  std::string url;  // full endpoint URL for Http
  std::string model_id = "text-davinci-003";
  std::string api_key_env = "SUPERICL_API_KEY";
  double threshold = 0.7;  // ThresholdOracle
  int timeout_ms = 60000;
  RetryPolicy retry;
};

struct DecodingConfig {
  double temperature = 0.0;
  int label_max_tokens = 16;
  int explanation_max_tokens = 128;
  std::vector<std::string> label_stop = {"\n\n"};
};

struct ExperimentConfig {
  TaskSchema schema;
  DatasetRef context_dataset;  // source of in-context examples
  DatasetRef eval_dataset;     // may be a different task's data (transfer runs)
  Mode mode = Mode::SuperICL;
  PromptConfig prompt;
  std::optional<PluginConfig> plugin;  // required unless mode is ICL
  BackendConfig backend;
  std::size_t num_examples = 32;
  std::uint64_t seed = 42;
  std::size_t token_budget = 4096;
  std::size_t completion_headroom = 128;
  DecodingConfig decoding;
  bool explanations = true;
  std::filesystem::path output_dir;
  std::filesystem::path cache_dir;  // empty disables the cache
  int parallelism = 4;
  double bin_width = 0.05;
  std::vector<std::uint64_t> seeds = {42, 0, 1, 2, 3};
  std::vector<std::size_t> sweep_ks = {0, 4, 8, 16, 32};
};

/// Relative paths resolve against `base_dir`. The "schema" key is either a
/// path to a schema file or an inline schema object.
ExperimentConfig config_from_json(const nlohmann::json& doc, const std::filesystem::path& base_dir);
ExperimentConfig load_config(const std::filesystem::path& path);
/// Self-contained snapshot: absolute paths, inline schema. Feeding it back
/// through config_from_json reproduces the run.
nlohmann::json config_to_json(const ExperimentConfig& cfg);
/// Checks cross-field constraints; throws ConfigError.
void validate_config(const ExperimentConfig& cfg);

/// Prompt flags actually used: ICL mode clears both plug-in prediction flags.
PromptConfig effective_prompt_config(const ExperimentConfig& cfg);

struct CallStats {
  std::size_t label_calls = 0;
  std::size_t explanation_calls = 0;
  std::size_t cache_hits = 0;
  std::size_t backend_invocations = 0;
  std::size_t plugin_invocations = 0;
};

struct DumpedPrompt {
  std::string id;
  std::string text;
  std::size_t entries_included = 0;
  std::size_t entries_requested = 0;
  std::size_t token_count = 0;
};

struct RunArtifact {
  nlohmann::json config_snapshot;
  std::vector<std::string> context_ids;  // in-context examples, in prompt order
  std::vector<DumpedPrompt> prompts;     // filled when prompt dumping is on
  EvalReport report;
  CallStats stats;
  bool failed = false;
  std::string failure;
};

/// Thrown by the runners when a test example fails; carries the records that
/// did complete (report.records) so they can be flushed with a failure marker.
class RunFailure : public Error {
 public:
  RunFailure(ErrorCode code, const std::string& detail, RunArtifact partial)
      : Error(code, detail), partial_(std::move(partial)) {}
  const RunArtifact& partial() const noexcept { return partial_; }

 private:
  RunArtifact partial_;
};

/// Datasets, plug-in, backend and cache for one configuration. Multi-seed,
/// sweep and ablation runs share one session so plug-in predictions are
/// computed once and the backend counters accumulate across runs.
class Session {
 public:
  explicit Session(const ExperimentConfig& cfg);
  /// Uses an externally supplied backend (tests inject counting stubs).
  Session(const ExperimentConfig& cfg, std::shared_ptr<CompletionBackend> backend);

  const ExperimentConfig& config() const { return cfg_; }
  const Dataset& context_dataset() const { return context_; }
  const Dataset& eval_dataset() const { return eval_; }
  const Plugin* plugin() const { return plugin_.get(); }
  std::size_t backend_invocations() const { return counting_ ? counting_->calls() : 0; }
  std::size_t plugin_invocations() const { return plugin_ ? plugin_->inner_calls() : 0; }

  RunArtifact run(const ExperimentConfig& cfg, bool dump_prompts = false);

 private:
  void init_backend(std::shared_ptr<CompletionBackend> raw);
  CompletionResponse call(const CompletionRequest& request);

  ExperimentConfig cfg_;
  Dataset context_;
  Dataset eval_;
  std::shared_ptr<MemoizedPlugin> plugin_;
  std::shared_ptr<CountingBackend> counting_;
  std::shared_ptr<CompletionBackend> backend_;  // retrying wrapper over counting_
  GoldOracle* gold_ = nullptr;
  std::unique_ptr<ResponseCache> cache_;
};

RunArtifact run_experiment(const ExperimentConfig& cfg, bool dump_prompts = false);

struct TableRow {
  std::string name;  // "seed=42", "k=8", "(1) ctxt conf -ref"
  RunArtifact artifact;
};

struct ResultTable {
  std::string kind;  // "run", "multi-seed", "sweep-k", "ablate"
  std::vector<TableRow> rows;
  std::optional<double> variance;  // multi-seed: over accuracy in percentage points
};

ResultTable run_multi_seed(const ExperimentConfig& cfg, const std::vector<std::uint64_t>& seeds,
                           bool dump_prompts = false);
ResultTable sweep_num_examples(const ExperimentConfig& cfg, const std::vector<std::size_t>& ks,
                               bool dump_prompts = false);

struct AblationRow {
  const char* name;
  bool context;
  bool confidence;
  bool reference;
};

/// Rows (1)-(4) of the component ablation followed by the full setting.
const std::vector<AblationRow>& ablation_rows();
ResultTable run_ablation_grid(const ExperimentConfig& cfg, bool dump_prompts = false);

/// Writes report.json, records.csv, histogram.csv, config.json, stats.json
/// and (when present) prompts.jsonl. Refuses a directory that already holds
/// report.json unless `overwrite`. A failed artifact also gets FAILED.
void emit_report(const RunArtifact& artifact, const std::filesystem::path& out_dir, bool overwrite);
/// Emits each row under its own subdirectory plus a summary CSV.
void emit_table(const ResultTable& table, const std::filesystem::path& out_dir, bool overwrite);

nlohmann::json table_summary_json(const ResultTable& table);
std::string table_csv(const ResultTable& table);

}  // namespace sicl
