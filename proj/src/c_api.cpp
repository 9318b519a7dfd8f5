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

#include "supericl/supericl.h"

#include <charconv>
#include <cstdlib>
#include <cstring>
#include <functional>
#include <memory>
#include <fstream>
#include <string>
#include <vector>

#include "supericl/runner.hpp"

struct sicl_config {
  sicl::ExperimentConfig cfg;
  std::string output_dir;
};

struct sicl_result {
  sicl::ResultTable table;
};

namespace {

thread_local std::string g_last_error;
thread_local std::string g_last_error_name;

sicl_status status_of(sicl::ErrorCode code) {
  switch (sicl::category_of(code)) {
    case sicl::ErrorCategory::Config: return SICL_ERR_CONFIG;
    case sicl::ErrorCategory::Data: return SICL_ERR_DATA;
    case sicl::ErrorCategory::Provider: return SICL_ERR_PROVIDER;
    case sicl::ErrorCategory::Io: return SICL_ERR_IO;
  }
  return SICL_ERR_INTERNAL;
}

sicl_status fail(sicl_status status, std::string name, std::string message) {
  g_last_error_name = std::move(name);
  g_last_error = std::move(message);
  return status;
}

/// Runs `fn`, translating exceptions into status codes and the thread-local
/// error slot.
template <typename F>
sicl_status guarded(F&& fn) {
  g_last_error.clear();
  g_last_error_name.clear();
  try {
    fn();
    return SICL_OK;
  } catch (const sicl::Error& e) {
    return fail(status_of(e.code()), std::string(sicl::to_string(e.code())), e.what());
  } catch (const std::bad_alloc&) {
    return fail(SICL_ERR_INTERNAL, "OutOfMemory", "out of memory");
  } catch (const std::exception& e) {
    return fail(SICL_ERR_INTERNAL, "Internal", e.what());
  }
}

char* dup_string(const std::string& s) {
  char* out = static_cast<char*>(std::malloc(s.size() + 1));
  if (!out) throw std::bad_alloc();
  std::memcpy(out, s.c_str(), s.size() + 1);
  return out;
}

template <typename T>
T parse_number(const char* key, const char* value) {
  T out{};
  const auto* end = value + std::strlen(value);
  auto [ptr, ec] = std::from_chars(value, end, out);
  if (ec != std::errc{} || ptr != end) {
    throw sicl::Error(sicl::ErrorCode::ConfigError,
                      std::string("bad value for ") + key + ": '" + value + "'");
  }
  return out;
}

sicl_status invalid(const char* what) {
  return fail(SICL_ERR_INVALID_ARGUMENT, "InvalidArgument", what);
}

sicl_status run_table(const sicl_config* cfg, sicl_result** out,
                      const std::function<sicl::ResultTable()>& fn) {
  if (!cfg || !out) return invalid("null argument");
  *out = nullptr;
  std::unique_ptr<sicl_result> partial;
  auto status = guarded([&] {
    try {
      auto res = std::make_unique<sicl_result>();
      res->table = fn();
      *out = res.release();
    } catch (const sicl::RunFailure& e) {
      partial = std::make_unique<sicl_result>();
      partial->table.kind = "run";
      partial->table.rows.push_back({"partial", e.partial()});
      throw;
    }
  });
  if (status != SICL_OK && partial) {
    *out = partial.release();
  }
  return status;
}

}  // namespace

extern "C" {

const char* sicl_version(void) { return "1.0.0"; }
const char* sicl_last_error(void) { return g_last_error.c_str(); }
const char* sicl_last_error_name(void) { return g_last_error_name.c_str(); }
void sicl_string_free(char* s) { std::free(s); }

sicl_status sicl_config_load(const char* path, sicl_config** out) {
  if (!path || !out) return invalid("null argument");
  *out = nullptr;
  return guarded([&] {
    auto cfg = std::make_unique<sicl_config>();
    cfg->cfg = sicl::load_config(path);
    cfg->output_dir = cfg->cfg.output_dir.string();
    *out = cfg.release();
  });
}

sicl_status sicl_config_parse(const char* json_text, const char* base_dir, sicl_config** out) {
  if (!json_text || !out) return invalid("null argument");
  *out = nullptr;
  return guarded([&] {
    nlohmann::json doc;
    try {
      doc = nlohmann::json::parse(json_text);
    } catch (const nlohmann::json::exception& e) {
      throw sicl::Error(sicl::ErrorCode::ConfigError, e.what());
    }
    auto cfg = std::make_unique<sicl_config>();
    const auto base = base_dir ? std::filesystem::path(base_dir) : std::filesystem::current_path();
    cfg->cfg = sicl::config_from_json(doc, std::filesystem::absolute(base));
    cfg->output_dir = cfg->cfg.output_dir.string();
    *out = cfg.release();
  });
}

void sicl_config_free(sicl_config* cfg) { delete cfg; }

sicl_status sicl_config_set(sicl_config* handle, const char* key, const char* value) {
  if (!handle || !key || !value) return invalid("null argument");
  return guarded([&] {
    sicl::ExperimentConfig next = handle->cfg;
    const std::string k = key;
    if (k == "seed") {
      next.seed = parse_number<std::uint64_t>(key, value);
    } else if (k == "k" || k == "num_examples") {
      next.num_examples = parse_number<std::size_t>(key, value);
    } else if (k == "mode") {
      next.mode = sicl::mode_from_string(value);
    } else if (k == "backend") {
      next.backend.kind = sicl::backend_kind_from_string(value);
    } else if (k == "cache_dir") {
      next.cache_dir = std::filesystem::absolute(value);
    } else if (k == "out" || k == "output_dir") {
      next.output_dir = std::filesystem::absolute(value);
    } else if (k == "token_budget") {
      next.token_budget = parse_number<std::size_t>(key, value);
    } else if (k == "parallelism") {
      next.parallelism = parse_number<int>(key, value);
    } else if (k == "bin_width") {
      next.bin_width = parse_number<double>(key, value);
    } else if (k == "explanations") {
      next.explanations = parse_number<int>(key, value) != 0;
    } else {
      throw sicl::Error(sicl::ErrorCode::ConfigError, "unknown config key '" + k + "'");
    }
    sicl::validate_config(next);
    handle->cfg = std::move(next);
    handle->output_dir = handle->cfg.output_dir.string();
  });
}

sicl_status sicl_config_to_json(const sicl_config* cfg, char** out_json) {
  if (!cfg || !out_json) return invalid("null argument");
  return guarded([&] { *out_json = dup_string(sicl::config_to_json(cfg->cfg).dump(2)); });
}

const char* sicl_config_output_dir(const sicl_config* cfg) {
  return cfg ? cfg->output_dir.c_str() : "";
}

sicl_status sicl_run(const sicl_config* cfg, int flags, sicl_result** out) {
  return run_table(cfg, out, [&] {
    sicl::ResultTable table{"run", {}, std::nullopt};
    table.rows.push_back({"run", sicl::run_experiment(cfg->cfg, flags & SICL_FLAG_DUMP_PROMPTS)});
    return table;
  });
}

sicl_status sicl_run_multi_seed(const sicl_config* cfg, const uint64_t* seeds, size_t n_seeds,
                                int flags, sicl_result** out) {
  return run_table(cfg, out, [&] {
    std::vector<std::uint64_t> list = seeds ? std::vector<std::uint64_t>(seeds, seeds + n_seeds)
                                            : cfg->cfg.seeds;
    return sicl::run_multi_seed(cfg->cfg, list, flags & SICL_FLAG_DUMP_PROMPTS);
  });
}

sicl_status sicl_sweep_k(const sicl_config* cfg, const size_t* ks, size_t n_ks, int flags,
                         sicl_result** out) {
  return run_table(cfg, out, [&] {
    std::vector<std::size_t> list = ks ? std::vector<std::size_t>(ks, ks + n_ks) : cfg->cfg.sweep_ks;
    return sicl::sweep_num_examples(cfg->cfg, list, flags & SICL_FLAG_DUMP_PROMPTS);
  });
}

sicl_status sicl_run_ablation(const sicl_config* cfg, int flags, sicl_result** out) {
  return run_table(cfg, out, [&] {
    return sicl::run_ablation_grid(cfg->cfg, flags & SICL_FLAG_DUMP_PROMPTS);
  });
}

sicl_status sicl_report_load(const char* run_dir, sicl_result** out) {
  if (!run_dir || !out) return invalid("null argument");
  *out = nullptr;
  return guarded([&] {
    const std::filesystem::path dir(run_dir);
    auto read_json = [&](const char* name) {
      std::ifstream in(dir / name);
      if (!in) throw sicl::Error(sicl::ErrorCode::IoError, "cannot open " + (dir / name).string());
      try {
        return nlohmann::json::parse(in);
      } catch (const nlohmann::json::exception& e) {
        throw sicl::Error(sicl::ErrorCode::MalformedRecord, (dir / name).string() + ": " + e.what());
      }
    };
    sicl::RunArtifact artifact;
    try {
      artifact.report = sicl::report_from_json(read_json("report.json"));
    } catch (const nlohmann::json::exception& e) {
      throw sicl::Error(sicl::ErrorCode::MalformedRecord, e.what());
    }
    if (std::filesystem::exists(dir / "config.json")) artifact.config_snapshot = read_json("config.json");
    if (std::filesystem::exists(dir / "stats.json")) {
      const auto stats = read_json("stats.json");
      artifact.stats.label_calls = stats.value("label_calls", std::size_t{0});
      artifact.stats.explanation_calls = stats.value("explanation_calls", std::size_t{0});
      artifact.stats.cache_hits = stats.value("cache_hits", std::size_t{0});
      artifact.stats.backend_invocations = stats.value("backend_invocations", std::size_t{0});
      artifact.stats.plugin_invocations = stats.value("plugin_invocations", std::size_t{0});
      artifact.context_ids = stats.value("context_ids", std::vector<std::string>{});
    }
    auto res = std::make_unique<sicl_result>();
    res->table.kind = "run";
    res->table.rows.push_back({"run", std::move(artifact)});
    *out = res.release();
  });
}

sicl_status sicl_result_emit(const sicl_result* res, const char* out_dir, int overwrite) {
  if (!res || !out_dir) return invalid("null argument");
  return guarded([&] { sicl::emit_table(res->table, out_dir, overwrite != 0); });
}

sicl_status sicl_result_summary_json(const sicl_result* res, char** out_json) {
  if (!res || !out_json) return invalid("null argument");
  return guarded([&] { *out_json = dup_string(sicl::table_summary_json(res->table).dump(2)); });
}

sicl_status sicl_result_report_json(const sicl_result* res, size_t row, char** out_json) {
  if (!res || !out_json) return invalid("null argument");
  if (row >= res->table.rows.size()) return invalid("row out of range");
  return guarded([&] {
    *out_json = dup_string(sicl::report_to_json(res->table.rows[row].artifact.report).dump(2));
  });
}

size_t sicl_result_row_count(const sicl_result* res) { return res ? res->table.rows.size() : 0; }

double sicl_result_accuracy(const sicl_result* res, size_t row) {
  if (!res || row >= res->table.rows.size()) return -1.0;
  return res->table.rows[row].artifact.report.accuracy;
}

int sicl_result_failed(const sicl_result* res) {
  if (!res) return 0;
  for (const auto& row : res->table.rows) {
    if (row.artifact.failed) return 1;
  }
  return 0;
}

int sicl_result_variance(const sicl_result* res, double* out) {
  if (!res || !out || !res->table.variance) return 0;
  *out = *res->table.variance;
  return 1;
}

sicl_status sicl_result_rebin(sicl_result* res, double bin_width) {
  if (!res) return invalid("null argument");
  return guarded([&] {
    for (auto& row : res->table.rows) {
      auto& report = row.artifact.report;
      report.histogram = sicl::confidence_histogram(report.records, bin_width);
      report.bin_width = bin_width;
    }
  });
}

void sicl_result_free(sicl_result* res) { delete res; }

sicl_status sicl_parse_label(const char* completion, const char* const* labels, size_t n_labels,
                             char** out_label) {
  if (!completion || (!labels && n_labels) || !out_label) return invalid("null argument");
  return guarded([&] {
    std::vector<std::string> set(labels, labels + n_labels);
    auto parsed = sicl::parse_label(completion, set);
    *out_label = parsed ? dup_string(*parsed) : nullptr;
  });
}

sicl_status sicl_variance(const double* values, size_t n, double* out) {
  if ((!values && n) || !out) return invalid("null argument");
  return guarded([&] { *out = sicl::variance_across_seeds(std::span<const double>(values, n)); });
}

sicl_status sicl_format_confidence(double confidence, int decimals, char** out) {
  if (!out) return invalid("null argument");
  if (decimals < 1) return invalid("decimals must be >= 1");
  return guarded([&] { *out = dup_string(sicl::format_confidence(confidence, decimals)); });
}

}  // extern "C"
