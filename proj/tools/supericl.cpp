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

// Command-line front end. Talks to the harness only through the C API.
//
// Exit codes: 0 success, 1 config error, 2 data error, 3 provider failure.

#include <CLI11.hpp>

#include <cstdint>
#include <cstring>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "supericl/supericl.h"

namespace {

int exit_code_for(sicl_status status) {
  switch (status) {
    case SICL_OK: return 0;
    case SICL_ERR_CONFIG:
    case SICL_ERR_INVALID_ARGUMENT: return 1;
    case SICL_ERR_PROVIDER: return 3;
    case SICL_ERR_IO:
      return std::strcmp(sicl_last_error_name(), "OutputExists") == 0 ? 1 : 2;
    default: return 2;
  }
}

int report_error(sicl_status status) {
  std::cerr << "supericl: " << sicl_last_error() << "\n";
  return exit_code_for(status);
}

struct ConfigDeleter {
  void operator()(sicl_config* c) const { sicl_config_free(c); }
};
struct ResultDeleter {
  void operator()(sicl_result* r) const { sicl_result_free(r); }
};
using ConfigPtr = std::unique_ptr<sicl_config, ConfigDeleter>;
using ResultPtr = std::unique_ptr<sicl_result, ResultDeleter>;

struct Options {
  std::string config;
  std::optional<std::uint64_t> seed;
  std::optional<std::size_t> k;
  std::string mode;
  std::string backend;
  std::string cache_dir;
  std::string out;
  bool dump_prompts = false;
  bool overwrite = false;
  std::vector<std::uint64_t> seeds;
  std::vector<std::size_t> ks;
  double bin_width = 0.0;
};

void add_run_options(CLI::App* cmd, Options& opt) {
  cmd->add_option("--config", opt.config, "Experiment config (JSON)")->required()->check(CLI::ExistingFile);
  cmd->add_option("--seed", opt.seed, "In-context sampling seed");
  cmd->add_option("--k", opt.k, "Number of in-context examples");
  cmd->add_option("--mode", opt.mode, "supericl | icl | plugin_only");
  cmd->add_option("--backend", opt.backend,
                  "http | gold_oracle | echo_plugin_oracle | threshold_oracle");
  cmd->add_option("--cache-dir", opt.cache_dir, "Response cache directory");
  cmd->add_option("--out", opt.out, "Output directory (defaults to the config's output_dir)");
  cmd->add_flag("--dump-prompts", opt.dump_prompts, "Write every label prompt to prompts.jsonl");
  cmd->add_flag("--overwrite", opt.overwrite, "Replace an existing run in the output directory");
}

sicl_status load_config(const Options& opt, ConfigPtr& cfg) {
  sicl_config* raw = nullptr;
  if (auto st = sicl_config_load(opt.config.c_str(), &raw); st != SICL_OK) return st;
  cfg.reset(raw);
  auto set = [&](const char* key, const std::string& value) {
    return value.empty() ? SICL_OK : sicl_config_set(cfg.get(), key, value.c_str());
  };
  sicl_status st = SICL_OK;
  if (opt.seed && st == SICL_OK) st = set("seed", std::to_string(*opt.seed));
  if (opt.k && st == SICL_OK) st = set("k", std::to_string(*opt.k));
  if (st == SICL_OK) st = set("mode", opt.mode);
  if (st == SICL_OK) st = set("backend", opt.backend);
  if (st == SICL_OK) st = set("cache_dir", opt.cache_dir);
  if (st == SICL_OK) st = set("out", opt.out);
  return st;
}

void print_summary(const sicl_result* res) {
  char* json = nullptr;
  if (sicl_result_summary_json(res, &json) == SICL_OK) {
    std::cout << json << "\n";
    sicl_string_free(json);
  }
}

template <typename RunFn>
int execute(const Options& opt, RunFn&& run) {
  ConfigPtr cfg;
  if (auto st = load_config(opt, cfg); st != SICL_OK) return report_error(st);
  const std::string out_dir = sicl_config_output_dir(cfg.get());
  if (out_dir.empty()) {
    std::cerr << "supericl: no output directory (set output_dir or pass --out)\n";
    return 1;
  }
  const int flags = opt.dump_prompts ? SICL_FLAG_DUMP_PROMPTS : 0;
  sicl_result* raw = nullptr;
  const sicl_status st = run(cfg.get(), flags, &raw);
  ResultPtr res(raw);
  if (st != SICL_OK) {
    // Keep the message before the emit call clears the error slot.
    const std::string message = sicl_last_error();
    const int code = exit_code_for(st);
    if (res && sicl_result_emit(res.get(), out_dir.c_str(), 1) == SICL_OK) {
      std::cerr << "supericl: partial results written to " << out_dir << " (marked FAILED)\n";
    }
    std::cerr << "supericl: " << message << "\n";
    return code;
  }
  if (auto est = sicl_result_emit(res.get(), out_dir.c_str(), opt.overwrite); est != SICL_OK) {
    return report_error(est);
  }
  print_summary(res.get());
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"SuperICL experiment harness"};
  app.set_version_flag("--version", std::string(sicl_version()));
  app.require_subcommand(1);

  Options opt;
  auto* run = app.add_subcommand("run", "Run one experiment");
  add_run_options(run, opt);

  auto* multi = app.add_subcommand("multi-seed", "Repeat a run over several sampling seeds");
  add_run_options(multi, opt);
  multi->add_option("--seeds", opt.seeds, "Seeds (default: config seeds, else 42 0 1 2 3)");

  auto* sweep = app.add_subcommand("sweep-k", "Vary the number of in-context examples");
  add_run_options(sweep, opt);
  sweep->add_option("--ks", opt.ks, "Example counts (default: config sweep_ks)");

  auto* ablate = app.add_subcommand("ablate", "Run the five-row component ablation grid");
  add_run_options(ablate, opt);

  auto* report = app.add_subcommand("report", "Summarize an emitted run directory");
  report->add_option("--out", opt.out, "Run directory containing report.json")->required();
  report->add_option("--bin-width", opt.bin_width, "Rewrite histogram.csv with this bin width");

  CLI11_PARSE(app, argc, argv);

  if (run->parsed()) {
    return execute(opt, [](const sicl_config* c, int f, sicl_result** r) { return sicl_run(c, f, r); });
  }
  if (multi->parsed()) {
    return execute(opt, [&](const sicl_config* c, int f, sicl_result** r) {
      return sicl_run_multi_seed(c, opt.seeds.empty() ? nullptr : opt.seeds.data(), opt.seeds.size(), f, r);
    });
  }
  if (sweep->parsed()) {
    return execute(opt, [&](const sicl_config* c, int f, sicl_result** r) {
      return sicl_sweep_k(c, opt.ks.empty() ? nullptr : opt.ks.data(), opt.ks.size(), f, r);
    });
  }
  if (ablate->parsed()) {
    return execute(opt, [](const sicl_config* c, int f, sicl_result** r) {
      return sicl_run_ablation(c, f, r);
    });
  }
  if (report->parsed()) {
    sicl_result* raw = nullptr;
    if (auto st = sicl_report_load(opt.out.c_str(), &raw); st != SICL_OK) return report_error(st);
    ResultPtr res(raw);
    if (opt.bin_width > 0.0) {
      if (auto st = sicl_result_rebin(res.get(), opt.bin_width); st != SICL_OK) return report_error(st);
      if (auto st = sicl_result_emit(res.get(), opt.out.c_str(), 1); st != SICL_OK) return report_error(st);
    }
    print_summary(res.get());
    return 0;
  }
  return 1;
}
