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

#include "supericl/runner.hpp"

#include <atomic>
#include <exception>
#include <mutex>
#include <thread>

#include "util.hpp"

namespace sicl {

namespace {

std::shared_ptr<const Plugin> make_plugin(const PluginConfig& pc, const TaskSchema& schema,
                                          const Dataset& context, const Dataset& eval,
                                          int parallelism) {
  switch (pc.spec.adapter) {
    case PluginAdapter::PredictionsFile:
      return std::make_shared<PredictionsFilePlugin>(load_predictions_file(pc.predictions_path), schema);
    case PluginAdapter::HttpClassifier: {
      auto url = split_url(pc.url);
      auto path = url.path == "/" ? std::string("/predict") : url.path;
      return std::make_shared<HttpClassifierPlugin>(std::make_shared<HttplibTransport>(url.origin),
                                                    schema, parallelism, path);
    }
    case PluginAdapter::CalibratedMock:
      return std::make_shared<CalibratedMockPlugin>(schema, gold_assignment_of({&context, &eval}),
                                                    pc.mock_target_accuracy, pc.mock_profile,
                                                    pc.mock_seed);
  }
  throw Error(ErrorCode::ConfigError, "unknown plug-in adapter");
}

std::shared_ptr<CompletionBackend> make_backend(const ExperimentConfig& cfg, GoldOracle** gold) {
  const auto& bc = cfg.backend;
  const auto& sep = cfg.prompt.entry_separator;
  switch (bc.kind) {
    case BackendKind::Http: {
      auto url = split_url(bc.url);
      auto transport = std::make_shared<HttplibTransport>(url.origin, std::chrono::milliseconds(bc.timeout_ms));
      return std::make_shared<HttpCompletionBackend>(transport, url.path, bc.api_key_env, cfg.parallelism);
    }
    case BackendKind::GoldOracle: {
      auto oracle = std::make_shared<GoldOracle>(sep);
      *gold = oracle.get();
      return oracle;
    }
    case BackendKind::EchoPluginOracle:
      return std::make_shared<EchoPluginOracle>(sep, cfg.prompt.label_cue);
    case BackendKind::ThresholdOracle:
      return std::make_shared<ThresholdOverrideOracle>(bc.threshold, cfg.schema.labels, sep);
  }
  throw Error(ErrorCode::ConfigError, "unknown backend");
}

}  // namespace

Session::Session(const ExperimentConfig& cfg) : Session(cfg, nullptr) {}

Session::Session(const ExperimentConfig& cfg, std::shared_ptr<CompletionBackend> backend)
    : cfg_(cfg) {
  validate_config(cfg_);
  context_ = load_dataset(cfg_.context_dataset.path, cfg_.context_dataset.format, cfg_.schema);
  eval_ = load_dataset(cfg_.eval_dataset.path, cfg_.eval_dataset.format, cfg_.schema);
  if (cfg_.plugin) {
    plugin_ = std::make_shared<MemoizedPlugin>(
        make_plugin(*cfg_.plugin, cfg_.schema, context_, eval_, cfg_.parallelism), cfg_.schema);
  }
  if (!cfg_.cache_dir.empty()) cache_ = std::make_unique<ResponseCache>(cfg_.cache_dir);
  if (backend) {
    init_backend(std::move(backend));
  } else if (cfg_.mode != Mode::PluginOnly) {
    init_backend(make_backend(cfg_, &gold_));
  }
}

void Session::init_backend(std::shared_ptr<CompletionBackend> raw) {
  if (!gold_) gold_ = dynamic_cast<GoldOracle*>(raw.get());
  counting_ = std::make_shared<CountingBackend>(std::move(raw));
  backend_ = std::make_shared<RetryingBackend>(counting_, cfg_.backend.retry);
}

CompletionResponse Session::call(const CompletionRequest& request) {
  if (!backend_) throw Error(ErrorCode::ConfigError, "no completion backend configured");
  if (cache_) return cached_complete(*cache_, *backend_, request);
  return complete(*backend_, request);
}

RunArtifact Session::run(const ExperimentConfig& cfg, bool dump_prompts) {
  validate_config(cfg);
  const PromptConfig pc = effective_prompt_config(cfg);
  const TaskSchema& schema = cfg_.schema;
  const bool uses_llm = cfg.mode != Mode::PluginOnly;
  const bool uses_plugin = cfg.mode != Mode::ICL;
  if (uses_plugin && !plugin_) throw Error(ErrorCode::ConfigError, "run needs a plugin");

  RunArtifact artifact;
  artifact.config_snapshot = config_to_json(cfg);

  // In-context examples are drawn in every LLM mode from the same seed, so
  // ICL and SuperICL runs see the same ids in the same order.
  std::vector<ContextEntry> entries;
  if (uses_llm && pc.include_context) {
    for (auto& ex : sample_in_context(context_, cfg.num_examples, cfg.seed)) {
      artifact.context_ids.push_back(ex.id);
      std::optional<PluginPrediction> pred;
      if (uses_plugin && pc.include_plugin_prediction_in_context) pred = plugin_->predict(ex);
      entries.push_back({std::move(ex), std::move(pred)});
    }
  }

  const auto& examples = eval_.examples;
  const std::size_t n = examples.size();
  std::vector<std::optional<PredictionRecord>> records(n);
  std::vector<std::optional<DumpedPrompt>> prompts(dump_prompts ? n : 0);
  std::atomic<std::size_t> next{0};
  std::atomic<std::size_t> label_calls{0}, explanation_calls{0}, hits{0};
  std::atomic<bool> stop{false};
  std::mutex err_mu;
  std::exception_ptr first_error;
  ByteHeuristicCounter counter;

  auto process = [&](std::size_t i) {
    const auto& ex = examples[i];
    std::optional<PluginPrediction> pred;
    if (uses_plugin) pred = plugin_->predict(ex);
    if (!uses_llm) {
      records[i] = make_record(ex.id, ex.gold_label, pred, pred->label, "");
      return;
    }
    const std::optional<PluginPrediction> test_pred =
        pc.include_plugin_prediction_for_test ? pred : std::nullopt;
    if (gold_) gold_->register_gold(render_test_block(ex.values, test_pred, schema, pc), ex.gold_label);
    const auto prompt = build_prompt(entries, ex.values, test_pred, schema, pc, cfg.token_budget,
                                     cfg.completion_headroom, counter);
    if (dump_prompts) {
      prompts[i] = DumpedPrompt{ex.id, prompt.text, prompt.entries_included,
                                prompt.entries_requested, prompt.token_count};
    }
    CompletionRequest request{cfg.backend.model_id, prompt.text, cfg.decoding.label_max_tokens,
                              cfg.decoding.temperature, cfg.decoding.label_stop};
    auto response = call(request);
    ++label_calls;
    if (response.from_cache) ++hits;
    auto record = make_record(ex.id, ex.gold_label, pred, parse_label(response.text, schema.labels),
                              response.text);
    if (record.overridden && cfg.explanations) {
      CompletionRequest follow{cfg.backend.model_id,
                               render_explanation_prompt(prompt.text, *record.final_label),
                               cfg.decoding.explanation_max_tokens, cfg.decoding.temperature, {}};
      auto expl = call(follow);
      ++explanation_calls;
      if (expl.from_cache) ++hits;
      record.explanation = std::string(detail::trim(expl.text));
    }
    records[i] = std::move(record);
  };

  auto worker = [&] {
    while (!stop.load()) {
      const std::size_t i = next.fetch_add(1);
      if (i >= n) return;
      try {
        process(i);
      } catch (...) {
        std::lock_guard lock(err_mu);
        if (!first_error) first_error = std::current_exception();
        stop = true;
      }
    }
  };

  const std::size_t workers = std::min<std::size_t>(static_cast<std::size_t>(cfg.parallelism), std::max<std::size_t>(n, 1));
  {
    std::vector<std::jthread> pool;
    for (std::size_t w = 1; w < workers; ++w) pool.emplace_back(worker);
    worker();
  }

  std::vector<PredictionRecord> done;
  for (auto& r : records) {
    if (r) done.push_back(std::move(*r));
  }
  for (auto& p : prompts) {
    if (p) artifact.prompts.push_back(std::move(*p));
  }
  artifact.stats.label_calls = label_calls;
  artifact.stats.explanation_calls = explanation_calls;
  artifact.stats.cache_hits = hits;
  artifact.stats.backend_invocations = backend_invocations();
  artifact.stats.plugin_invocations = plugin_invocations();

  if (first_error) {
    artifact.failed = true;
    artifact.report.records = std::move(done);
    artifact.report.n = artifact.report.records.size();
    ErrorCode code = ErrorCode::IoError;
    try {
      std::rethrow_exception(first_error);
    } catch (const Error& e) {
      code = e.code();
      artifact.failure = e.what();
    } catch (const std::exception& e) {
      artifact.failure = e.what();
    }
    throw RunFailure(code, "task '" + schema.task_id + "' seed " + std::to_string(cfg.seed) + ": " +
                               artifact.failure,
                     std::move(artifact));
  }
  if (done.empty()) throw Error(ErrorCode::EmptyRecords, "evaluation dataset is empty");
  artifact.report = build_report(std::move(done), schema, cfg.bin_width);
  return artifact;
}

RunArtifact run_experiment(const ExperimentConfig& cfg, bool dump_prompts) {
  Session session(cfg);
  return session.run(cfg, dump_prompts);
}

namespace {

double pct(double fraction) { return 100.0 * fraction; }

}  // namespace

ResultTable run_multi_seed(const ExperimentConfig& cfg, const std::vector<std::uint64_t>& seeds,
                           bool dump_prompts) {
  if (seeds.size() < 2) throw Error(ErrorCode::TooFewValues, "multi-seed needs at least 2 seeds");
  Session session(cfg);
  ResultTable table{"multi-seed", {}, std::nullopt};
  std::vector<double> accs;
  for (auto seed : seeds) {
    ExperimentConfig run_cfg = cfg;
    run_cfg.seed = seed;
    auto artifact = session.run(run_cfg, dump_prompts);
    accs.push_back(pct(artifact.report.accuracy));
    table.rows.push_back({"seed=" + std::to_string(seed), std::move(artifact)});
  }
  table.variance = variance_across_seeds(accs);
  return table;
}

ResultTable sweep_num_examples(const ExperimentConfig& cfg, const std::vector<std::size_t>& ks,
                               bool dump_prompts) {
  if (ks.empty()) throw Error(ErrorCode::ConfigError, "sweep needs at least one k");
  Session session(cfg);
  for (auto k : ks) {
    if (k > session.context_dataset().size()) {
      throw Error(ErrorCode::KTooLarge, "k=" + std::to_string(k) + " exceeds the context dataset (" +
                                            std::to_string(session.context_dataset().size()) + ")");
    }
  }
  ResultTable table{"sweep-k", {}, std::nullopt};
  for (auto k : ks) {
    ExperimentConfig run_cfg = cfg;
    run_cfg.num_examples = k;
    table.rows.push_back({"k=" + std::to_string(k), session.run(run_cfg, dump_prompts)});
  }
  return table;
}

const std::vector<AblationRow>& ablation_rows() {
  static const std::vector<AblationRow> rows = {
      {"(1) ctxt+conf-ref", true, true, false},
      {"(2) ctxt-conf+ref", true, false, true},
      {"(3) -ctxt+conf+ref", false, true, true},
      {"(4) -ctxt-conf+ref", false, false, true},
      {"full", true, true, true},
  };
  return rows;
}

ResultTable run_ablation_grid(const ExperimentConfig& cfg, bool dump_prompts) {
  Session session(cfg);
  ResultTable table{"ablate", {}, std::nullopt};
  for (const auto& row : ablation_rows()) {
    ExperimentConfig run_cfg = cfg;
    run_cfg.mode = Mode::SuperICL;
    run_cfg.prompt.include_context = row.context;
    run_cfg.prompt.include_confidence = row.confidence;
    run_cfg.prompt.include_plugin_prediction_for_test = row.reference;
    run_cfg.prompt.include_plugin_prediction_in_context = true;
    table.rows.push_back({row.name, session.run(run_cfg, dump_prompts)});
  }
  return table;
}

}  // namespace sicl
