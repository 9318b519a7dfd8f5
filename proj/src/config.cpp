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

// Declarative experiment config: JSON <-> ExperimentConfig.

#include <fstream>
#include <set>

#include "supericl/runner.hpp"

namespace sicl {

using json = nlohmann::json;
namespace fs = std::filesystem;

std::string_view to_string(Mode mode) noexcept {
  switch (mode) {
    case Mode::SuperICL: return "supericl";
    case Mode::ICL: return "icl";
    case Mode::PluginOnly: return "plugin_only";
  }
  return "?";
}

Mode mode_from_string(std::string_view name) {
  if (name == "supericl") return Mode::SuperICL;
  if (name == "icl") return Mode::ICL;
  if (name == "plugin_only" || name == "plugin-only") return Mode::PluginOnly;
  throw Error(ErrorCode::ConfigError, "unknown mode '" + std::string(name) + "'");
}

std::string_view to_string(BackendKind kind) noexcept {
  switch (kind) {
    case BackendKind::Http: return "http";
    case BackendKind::GoldOracle: return "gold_oracle";
    case BackendKind::EchoPluginOracle: return "echo_plugin_oracle";
    case BackendKind::ThresholdOracle: return "threshold_oracle";
  }
  return "?";
}

BackendKind backend_kind_from_string(std::string_view name) {
  if (name == "http") return BackendKind::Http;
  if (name == "gold_oracle" || name == "gold") return BackendKind::GoldOracle;
  if (name == "echo_plugin_oracle" || name == "echo") return BackendKind::EchoPluginOracle;
  if (name == "threshold_oracle" || name == "threshold") return BackendKind::ThresholdOracle;
  throw Error(ErrorCode::ConfigError, "unknown backend '" + std::string(name) + "'");
}

namespace {

std::string_view to_string(PluginAdapter a) {
  switch (a) {
    case PluginAdapter::PredictionsFile: return "predictions_file";
    case PluginAdapter::HttpClassifier: return "http";
    case PluginAdapter::CalibratedMock: return "mock";
  }
  return "?";
}

PluginAdapter adapter_from_string(const std::string& name) {
  if (name == "predictions_file") return PluginAdapter::PredictionsFile;
  if (name == "http") return PluginAdapter::HttpClassifier;
  if (name == "mock") return PluginAdapter::CalibratedMock;
  throw Error(ErrorCode::ConfigError, "unknown plug-in adapter '" + name + "'");
}

ConfidenceProfile profile_from_string(const std::string& name) {
  if (name == "constant_high") return ConfidenceProfile::ConstantHigh;
  if (name == "noisy_calibrated") return ConfidenceProfile::NoisyCalibrated;
  throw Error(ErrorCode::ConfigError, "unknown confidence profile '" + name + "'");
}

void reject_unknown_keys(const json& obj, std::initializer_list<const char*> allowed,
                         const std::string& where) {
  std::set<std::string> ok(allowed.begin(), allowed.end());
  for (const auto& [key, _] : obj.items()) {
    if (!ok.contains(key)) throw Error(ErrorCode::ConfigError, where + ": unknown key '" + key + "'");
  }
}

fs::path resolve(const fs::path& base, const std::string& p) {
  if (p.empty()) return {};
  fs::path path(p);
  return path.is_absolute() ? path : (base / path).lexically_normal();
}

DatasetRef dataset_ref(const json& v, const fs::path& base) {
  DatasetRef ref;
  if (v.is_string()) {
    ref.path = resolve(base, v.get<std::string>());
    ref.format = dataset_format_for(ref.path);
    return ref;
  }
  reject_unknown_keys(v, {"path", "format"}, "dataset");
  ref.path = resolve(base, v.at("path").get<std::string>());
  ref.format = v.contains("format") ? dataset_format_from_string(v["format"].get<std::string>())
                                    : dataset_format_for(ref.path);
  return ref;
}

json dataset_json(const DatasetRef& ref) {
  return {{"path", fs::absolute(ref.path).lexically_normal().string()},
          {"format", ref.format == DatasetFormat::Jsonl ? "jsonl" : "tsv"}};
}

std::string abs_string(const fs::path& p) {
  return p.empty() ? std::string() : fs::absolute(p).lexically_normal().string();
}

}  // namespace

ExperimentConfig config_from_json(const json& doc, const fs::path& base_dir) {
  ExperimentConfig cfg;
  try {
    reject_unknown_keys(doc,
                        {"schema", "context_dataset", "eval_dataset", "mode", "prompt", "plugin",
                         "backend", "num_examples", "seed", "token_budget", "completion_headroom",
                         "decoding", "explanations", "output_dir", "cache_dir", "parallelism",
                         "bin_width", "seeds", "sweep_ks"},
                        "config");
    const auto& schema = doc.at("schema");
    cfg.schema = schema.is_string() ? load_schema(resolve(base_dir, schema.get<std::string>()))
                                    : schema_from_json(schema);
    cfg.context_dataset = dataset_ref(doc.at("context_dataset"), base_dir);
    cfg.eval_dataset = dataset_ref(doc.at("eval_dataset"), base_dir);
    if (doc.contains("mode")) cfg.mode = mode_from_string(doc["mode"].get<std::string>());

    if (auto it = doc.find("prompt"); it != doc.end()) {
      const auto& p = *it;
      reject_unknown_keys(p,
                          {"include_context", "include_confidence",
                           "include_plugin_prediction_for_test",
                           "include_plugin_prediction_in_context", "plugin_display_name",
                           "confidence_decimals", "entry_separator", "label_cue"},
                          "prompt");
      auto& pc = cfg.prompt;
      pc.include_context = p.value("include_context", pc.include_context);
      pc.include_confidence = p.value("include_confidence", pc.include_confidence);
      pc.include_plugin_prediction_for_test =
          p.value("include_plugin_prediction_for_test", pc.include_plugin_prediction_for_test);
      pc.include_plugin_prediction_in_context =
          p.value("include_plugin_prediction_in_context", pc.include_plugin_prediction_in_context);
      pc.plugin_display_name = p.value("plugin_display_name", pc.plugin_display_name);
      pc.confidence_decimals = p.value("confidence_decimals", pc.confidence_decimals);
      pc.entry_separator = p.value("entry_separator", pc.entry_separator);
      pc.label_cue = p.value("label_cue", pc.label_cue);
    }

    if (auto it = doc.find("plugin"); it != doc.end() && !it->is_null()) {
      const auto& p = *it;
      reject_unknown_keys(p, {"display_name", "adapter", "predictions", "url", "mock"}, "plugin");
      PluginConfig pl;
      pl.spec.display_name = p.value("display_name", pl.spec.display_name);
      pl.spec.adapter = adapter_from_string(p.value("adapter", std::string("predictions_file")));
      pl.predictions_path = resolve(base_dir, p.value("predictions", std::string()));
      pl.url = p.value("url", std::string());
      if (auto m = p.find("mock"); m != p.end()) {
        reject_unknown_keys(*m, {"target_accuracy", "profile", "seed"}, "plugin.mock");
        pl.mock_target_accuracy = m->value("target_accuracy", pl.mock_target_accuracy);
        pl.mock_profile = profile_from_string(m->value("profile", std::string("noisy_calibrated")));
        pl.mock_seed = m->value("seed", pl.mock_seed);
      }
      cfg.plugin = pl;
      // The prompt prints the plug-in's display name unless overridden.
      if (!doc.contains("prompt") || !doc["prompt"].contains("plugin_display_name")) {
        cfg.prompt.plugin_display_name = pl.spec.display_name;
      }
    }

    if (auto it = doc.find("backend"); it != doc.end()) {
      const auto& b = *it;
      if (b.is_string()) {
        cfg.backend.kind = backend_kind_from_string(b.get<std::string>());
      } else {
        reject_unknown_keys(b, {"kind", "url", "model", "api_key_env", "threshold", "timeout_ms", "retry"},
                            "backend");
        auto& bc = cfg.backend;
        bc.kind = backend_kind_from_string(b.value("kind", std::string(to_string(bc.kind))));
        bc.url = b.value("url", bc.url);
        bc.model_id = b.value("model", bc.model_id);
        bc.api_key_env = b.value("api_key_env", bc.api_key_env);
        bc.threshold = b.value("threshold", bc.threshold);
        bc.timeout_ms = b.value("timeout_ms", bc.timeout_ms);
        if (auto r = b.find("retry"); r != b.end()) {
          reject_unknown_keys(*r, {"max_attempts", "base_delay_ms", "multiplier", "max_delay_ms"},
                              "backend.retry");
          bc.retry.max_attempts = r->value("max_attempts", bc.retry.max_attempts);
          bc.retry.base_delay =
              std::chrono::milliseconds(r->value("base_delay_ms", bc.retry.base_delay.count()));
          bc.retry.multiplier = r->value("multiplier", bc.retry.multiplier);
          bc.retry.max_delay =
              std::chrono::milliseconds(r->value("max_delay_ms", bc.retry.max_delay.count()));
        }
      }
    }

    cfg.num_examples = doc.value("num_examples", cfg.num_examples);
    cfg.seed = doc.value("seed", cfg.seed);
    cfg.token_budget = doc.value("token_budget", cfg.token_budget);
    cfg.completion_headroom = doc.value("completion_headroom", cfg.completion_headroom);
    if (auto it = doc.find("decoding"); it != doc.end()) {
      reject_unknown_keys(*it, {"temperature", "label_max_tokens", "explanation_max_tokens", "label_stop"},
                          "decoding");
      auto& d = cfg.decoding;
      d.temperature = it->value("temperature", d.temperature);
      d.label_max_tokens = it->value("label_max_tokens", d.label_max_tokens);
      d.explanation_max_tokens = it->value("explanation_max_tokens", d.explanation_max_tokens);
      d.label_stop = it->value("label_stop", d.label_stop);
    }
    cfg.explanations = doc.value("explanations", cfg.explanations);
    cfg.output_dir = resolve(base_dir, doc.value("output_dir", std::string()));
    cfg.cache_dir = resolve(base_dir, doc.value("cache_dir", std::string()));
    cfg.parallelism = doc.value("parallelism", cfg.parallelism);
    cfg.bin_width = doc.value("bin_width", cfg.bin_width);
    cfg.seeds = doc.value("seeds", cfg.seeds);
    cfg.sweep_ks = doc.value("sweep_ks", cfg.sweep_ks);
  } catch (const json::exception& e) {
    throw Error(ErrorCode::ConfigError, e.what());
  }
  validate_config(cfg);
  return cfg;
}

ExperimentConfig load_config(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::ConfigError, "cannot open config " + path.string());
  json doc;
  try {
    doc = json::parse(in);
  } catch (const json::exception& e) {
    throw Error(ErrorCode::ConfigError, path.string() + ": " + e.what());
  }
  return config_from_json(doc, fs::absolute(path).parent_path());
}

json config_to_json(const ExperimentConfig& cfg) {
  const auto& pc = cfg.prompt;
  json doc = {
      {"schema", schema_to_json(cfg.schema)},
      {"context_dataset", dataset_json(cfg.context_dataset)},
      {"eval_dataset", dataset_json(cfg.eval_dataset)},
      {"mode", to_string(cfg.mode)},
      {"prompt",
       {{"include_context", pc.include_context},
        {"include_confidence", pc.include_confidence},
        {"include_plugin_prediction_for_test", pc.include_plugin_prediction_for_test},
        {"include_plugin_prediction_in_context", pc.include_plugin_prediction_in_context},
        {"plugin_display_name", pc.plugin_display_name},
        {"confidence_decimals", pc.confidence_decimals},
        {"entry_separator", pc.entry_separator},
        {"label_cue", pc.label_cue}}},
      {"backend",
       {{"kind", to_string(cfg.backend.kind)},
        {"url", cfg.backend.url},
        {"model", cfg.backend.model_id},
        {"api_key_env", cfg.backend.api_key_env},
        {"threshold", cfg.backend.threshold},
        {"timeout_ms", cfg.backend.timeout_ms},
        {"retry",
         {{"max_attempts", cfg.backend.retry.max_attempts},
          {"base_delay_ms", cfg.backend.retry.base_delay.count()},
          {"multiplier", cfg.backend.retry.multiplier},
          {"max_delay_ms", cfg.backend.retry.max_delay.count()}}}}},
      {"num_examples", cfg.num_examples},
      {"seed", cfg.seed},
      {"token_budget", cfg.token_budget},
      {"completion_headroom", cfg.completion_headroom},
      {"decoding",
       {{"temperature", cfg.decoding.temperature},
        {"label_max_tokens", cfg.decoding.label_max_tokens},
        {"explanation_max_tokens", cfg.decoding.explanation_max_tokens},
        {"label_stop", cfg.decoding.label_stop}}},
      {"explanations", cfg.explanations},
      {"output_dir", abs_string(cfg.output_dir)},
      {"cache_dir", abs_string(cfg.cache_dir)},
      {"parallelism", cfg.parallelism},
      {"bin_width", cfg.bin_width},
      {"seeds", cfg.seeds},
      {"sweep_ks", cfg.sweep_ks}};
  if (cfg.plugin) {
    const auto& pl = *cfg.plugin;
    doc["plugin"] = {{"display_name", pl.spec.display_name},
                     {"adapter", to_string(pl.spec.adapter)},
                     {"predictions", abs_string(pl.predictions_path)},
                     {"url", pl.url},
                     {"mock",
                      {{"target_accuracy", pl.mock_target_accuracy},
                       {"profile", pl.mock_profile == ConfidenceProfile::ConstantHigh
                                       ? "constant_high"
                                       : "noisy_calibrated"},
                       {"seed", pl.mock_seed}}}};
  } else {
    doc["plugin"] = nullptr;
  }
  return doc;
}

void validate_config(const ExperimentConfig& cfg) {
  validate_schema(cfg.schema);
  validate_prompt_config(cfg.prompt);
  auto fail = [](const std::string& what) { throw Error(ErrorCode::ConfigError, what); };
  if (cfg.mode != Mode::ICL && !cfg.plugin) fail("mode " + std::string(to_string(cfg.mode)) + " needs a plugin");
  if (cfg.plugin) {
    const auto& pl = *cfg.plugin;
    if (pl.spec.display_name.empty() || pl.spec.display_name.find_first_of("\r\n") != std::string::npos) {
      fail("plugin display_name must be non-empty and single-line");
    }
    if (pl.spec.adapter == PluginAdapter::PredictionsFile && pl.predictions_path.empty()) {
      fail("predictions_file adapter needs 'predictions'");
    }
    if (pl.spec.adapter == PluginAdapter::HttpClassifier && pl.url.empty()) fail("http adapter needs 'url'");
    if (!(pl.mock_target_accuracy >= 0.0 && pl.mock_target_accuracy <= 1.0)) {
      fail("mock target_accuracy must lie in [0, 1]");
    }
  }
  if (cfg.mode != Mode::PluginOnly && cfg.backend.kind == BackendKind::Http && cfg.backend.url.empty()) {
    fail("http backend needs 'url'");
  }
  if (cfg.token_budget <= cfg.completion_headroom) fail("token_budget must exceed completion_headroom");
  if (cfg.decoding.label_max_tokens < 1 || cfg.decoding.explanation_max_tokens < 1) {
    fail("max token counts must be >= 1");
  }
  if (cfg.decoding.temperature < 0) fail("temperature must be >= 0");
  if (cfg.parallelism < 1) fail("parallelism must be >= 1");
  if (cfg.backend.retry.max_attempts < 1) fail("retry.max_attempts must be >= 1");
}

PromptConfig effective_prompt_config(const ExperimentConfig& cfg) {
  PromptConfig pc = cfg.prompt;
  if (cfg.mode == Mode::ICL) {
    pc.include_plugin_prediction_in_context = false;
    pc.include_plugin_prediction_for_test = false;
  }
  return pc;
}

}  // namespace sicl
