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


// Acceptance checks. Prints one PASS/FAIL line per criterion and exits
// non-zero if any fails. Each check also has a wall-clock limit.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <random>
#include <set>

#include "test_support.hpp"

namespace sicl {
namespace {

namespace fs = std::filesystem;
using testing::data_path;
using testing::TempDir;

struct Check {
  bool ok = true;
  std::string why;

  void require(bool cond, const std::string& what) {
    if (!cond && ok) {
      ok = false;
      why = what;
    }
  }
};

ExperimentConfig with_mode(ExperimentConfig cfg, Mode mode) {
  cfg.mode = mode;
  return cfg;
}

// 1. The MRPC demo prompt, byte for byte.
void golden_prompt(Check& c) {
  const auto schema = testing::mrpc_schema();
  const auto ctx = load_dataset(data_path("mrpc_demo_context.jsonl"), DatasetFormat::Jsonl, schema);
  const auto tst = load_dataset(data_path("mrpc_demo_test.jsonl"), DatasetFormat::Jsonl, schema);
  const auto preds = load_predictions_file(data_path("mrpc_demo_predictions.jsonl"));
  std::vector<ContextEntry> entries;
  for (const auto& ex : ctx.examples) entries.push_back({ex, preds.at(ex.id)});
  const auto& test = tst.examples.at(0);
  const auto p = build_prompt(entries, test.values, preds.at(test.id), schema, PromptConfig{}, 4096, 128,
                              ByteHeuristicCounter{});
  c.require(p.text == testing::read_file(data_path("mrpc_demo_golden_prompt.txt")), "prompt differs from golden text");

  // Line grammar, independently of the golden file.
  const auto lines = testing::lines_of(p.text);
  const std::vector<std::string> confs = {"0.51", "0.98", "0.82"};
  c.require(lines.size() == 14, "expected 14 lines");
  for (std::size_t b = 0; b < 3 && lines.size() == 14; ++b) {
    const std::size_t at = b * 5;
    c.require(lines[at].rfind("Sentence 1: ", 0) == 0, "Sentence 1 line");
    c.require(lines[at + 1].rfind("Sentence 2: ", 0) == 0, "Sentence 2 line");
    c.require(lines[at + 2].rfind("RoBERTa-Large Prediction: ", 0) == 0 &&
                  lines[at + 2].ends_with(" (Confidence: " + confs[b] + ")"),
              "prediction line " + std::to_string(b));
    if (b < 2) {
      c.require(lines[at + 3] == "Label: not_equivalent", "context label line");
      c.require(lines[at + 4].empty(), "blank separator");
    } else {
      c.require(lines[at + 3] == "Label:", "bare cue");
    }
  }
}

// 2. Oracle equivalences on a 200-example mock fixture.
void oracle_equivalence(Check& c) {
  TempDir dir;
  const auto echo_cfg = testing::mock_fixture(dir.path(), 64, 200, "echo_plugin_oracle");
  const auto super = run_experiment(echo_cfg);
  const auto plugin_only = run_experiment(with_mode(echo_cfg, Mode::PluginOnly));
  c.require(super.report.n == 200, "fixture size");
  c.require(super.report.accuracy == plugin_only.report.accuracy, "echo accuracy != plug-in accuracy");
  c.require(super.report.pct_overridden == 0.0, "echo oracle overrode something");
  auto gold_cfg = echo_cfg;
  gold_cfg.backend.kind = BackendKind::GoldOracle;
  c.require(run_experiment(gold_cfg).report.accuracy == 1.0, "gold oracle accuracy != 1");
}

// 3. Variance over five seed accuracies.
void variance(Check& c) {
  const std::vector<double> sst2 = {91.39, 94.04, 94.38, 93.12, 93.46};
  const std::vector<double> mrpc = {60.05, 73.53, 73.28, 73.28, 65.44};
  const double v1 = variance_across_seeds(sst2), v2 = variance_across_seeds(mrpc);
  c.require(std::abs(v1 - 1.35) <= 0.01, "SST-2 variance " + std::to_string(v1));
  c.require(std::abs(v2 - 37.47) <= 0.005, "MRPC variance " + std::to_string(v2));
  c.require(std::abs(v2 - 37.50) <= 0.05, "MRPC variance vs printed " + std::to_string(v2));
}

// 4. Ablation grid prompt properties.
void ablation(Check& c) {
  TempDir dir;
  const auto cfg = testing::mock_fixture(dir.path(), 40, 30, "threshold_oracle");
  const auto grid = run_ablation_grid(cfg, true);
  c.require(grid.rows.size() == 5, "grid has 5 rows");
  for (std::size_t i = 0; i < grid.rows.size(); ++i) {
    const auto& spec = ablation_rows()[i];
    const auto& prompts = grid.rows[i].artifact.prompts;
    c.require(prompts.size() == 30, "one dumped prompt per example");
    for (const auto& p : prompts) {
      const std::string row = spec.name;
      if (!spec.confidence) c.require(p.text.find("(Confidence:") == std::string::npos, row + ": confidence shown");
      if (spec.confidence) c.require(p.text.find("(Confidence:") != std::string::npos, row + ": confidence missing");
      const auto block = testing::test_block_lines(p.text);
      bool block_has_pred = false;
      for (const auto& line : block) block_has_pred |= line.find("Prediction:") != std::string::npos;
      c.require(block_has_pred == spec.reference, row + ": test-block reference mismatch");
      if (!spec.context) {
        c.require(p.text.find("\n\n") == std::string::npos && p.entries_included == 0,
                  row + ": context present");
        c.require(testing::lines_of(p.text).size() == block.size(), row + ": not test-block only");
      } else {
        c.require(p.entries_included == cfg.num_examples, row + ": context missing");
      }
    }
  }
}

// 5. Budget fitting against brute force.
void budget(Check& c) {
  const PromptConfig cfg;
  const ByteHeuristicCounter counter;
  const auto f = testing::nine_of_sixteen();
  const auto expected = testing::max_feasible_prefix(f.entries, f.test_input, f.test_pred, f.schema, cfg, 4096, 128);
  const auto p = build_prompt(f.entries, f.test_input, f.test_pred, f.schema, cfg, 4096, 128, counter);
  c.require(expected == std::optional<std::size_t>(9), "fixture is not a 9-of-16 case");
  c.require(p.entries_included == 9 && p.entries_requested == 16, "build_prompt did not keep 9 of 16");
  c.require(p.token_count + 128 <= 4096, "budget exceeded");

  std::mt19937_64 rng(4096);
  for (int trial = 0; trial < 1000 && c.ok; ++trial) {
    std::vector<ContextEntry> entries;
    const std::size_t n = rng() % 17;
    for (std::size_t i = 0; i < n; ++i) {
      entries.push_back({{"r" + std::to_string(i),
                          {{"sentence1", std::string(rng() % 600, 'w')}, {"sentence2", std::string(rng() % 80, 'v')}},
                          f.schema.labels[rng() % 2]},
                         PluginPrediction{f.schema.labels[rng() % 2], static_cast<double>(rng() % 101) / 100.0}});
    }
    const FieldValues input{{"sentence1", std::string(rng() % 300, 't')}, {"sentence2", "u"}};
    const std::optional<PluginPrediction> pred =
        rng() % 2 ? std::optional<PluginPrediction>(PluginPrediction{"equivalent", 0.5}) : std::nullopt;
    const std::size_t headroom = rng() % 128;
    const std::size_t budget = headroom + 1 + rng() % 1500;
    std::optional<std::size_t> prev;
    for (std::size_t b : {budget, budget + 50, budget + 400}) {
      const auto want = testing::max_feasible_prefix(entries, input, pred, f.schema, cfg, b, headroom);
      std::optional<std::size_t> got;
      try {
        const auto r = build_prompt(entries, input, pred, f.schema, cfg, b, headroom, counter);
        c.require(r.token_count + headroom <= b, "trial " + std::to_string(trial) + ": over budget");
        c.require(r.token_count == counter.count(r.text), "token count mismatch");
        got = r.entries_included;
      } catch (const Error& e) {
        c.require(e.code() == ErrorCode::TestBlockTooLarge, "unexpected error");
      }
      c.require(got == want, "trial " + std::to_string(trial) + ": not the maximal feasible prefix");
      if (prev && got) c.require(*got >= *prev, "trial " + std::to_string(trial) + ": not monotone in budget");
      if (got) prev = got;
    }
  }
}

// 6. Override statistics and threshold behaviour.
void overrides(Check& c) {
  const std::string a = "equivalent", b = "not_equivalent";
  const std::vector<std::string> plugin = {a, a, b, b}, final_labels = {a, b, b, a}, gold = {a, b, b, b};
  std::vector<PredictionRecord> rs;
  for (int i = 0; i < 4; ++i) rs.push_back(make_record(std::to_string(i), gold[i], PluginPrediction{plugin[i], 0.6}, final_labels[i], ""));
  const auto s = override_stats(rs);
  c.require(s.pct_overridden == 0.5 && s.overridden_accuracy == 0.5, "hand fixture != (0.50, 0.50)");

  TempDir dir;
  const auto cfg = testing::mock_fixture(dir.path(), 40, 400, "threshold_oracle");
  const auto run = run_experiment(cfg);
  std::size_t overridden = 0;
  for (const auto& r : run.report.records) {
    if (!r.overridden) continue;
    ++overridden;
    c.require(r.plugin_pred && r.plugin_pred->confidence < 0.7, "override at confidence >= 0.7");
  }
  c.require(overridden > 0, "threshold oracle never overrode");
  const auto& h = run.report.histogram;
  const std::size_t tau_bin = static_cast<std::size_t>(std::llround(0.7 / run.report.bin_width));
  c.require(h.size() == 20, "histogram bins");
  std::size_t below = 0;
  for (std::size_t i = 0; i < h.size(); ++i) {
    if (i >= tau_bin) c.require(h[i].count_overridden == 0, "overridden mass at or above the 0.7 bin");
    else below += h[i].count_overridden;
  }
  c.require(below == overridden, "histogram overridden mass != overridden records");
}

// 7. MCC fixture, degenerate case and label-swap symmetry.
void mcc(Check& c) {
  const std::vector<std::string> labels = {"equivalent", "not_equivalent"}, swapped = {labels[1], labels[0]};
  auto r = [](std::string g, std::optional<std::string> f) { return make_record("x", std::move(g), std::nullopt, std::move(f), ""); };
  std::vector<PredictionRecord> fixture = {r(labels[0], labels[0]), r(labels[0], labels[0]), r(labels[1], labels[1]),
                                           r(labels[1], labels[0])};
  const double m = matthews_corr(fixture, labels);
  c.require(std::abs(m - 0.5774) <= 1e-4, "MCC fixture " + std::to_string(m));
  c.require(std::abs(m - 2.0 / std::sqrt(12.0)) <= 1e-12, "MCC formula");
  std::vector<PredictionRecord> constant = {r(labels[0], labels[1]), r(labels[1], labels[1]), r(labels[1], labels[1])};
  c.require(matthews_corr(constant, labels) == 0.0, "constant predictor MCC != 0");

  std::mt19937_64 rng(7);
  for (int t = 0; t < 100; ++t) {
    std::vector<PredictionRecord> rs, flipped;
    const std::size_t n = 2 + rng() % 50;
    for (std::size_t i = 0; i < n; ++i) {
      const std::size_t g = rng() % 2, f = rng() % 2;
      rs.push_back(r(labels[g], labels[f]));
      flipped.push_back(r(labels[1 - g], labels[1 - f]));
    }
    const double base = matthews_corr(rs, labels);
    c.require(std::abs(matthews_corr(rs, swapped) - base) <= 1e-12, "positive-class swap changed MCC");
    c.require(std::abs(matthews_corr(flipped, labels) - base) <= 1e-12, "label renaming changed MCC");
  }
}

// 8. Cached reruns and digest sensitivity.
void cache(Check& c) {
  for (const char* backend : {"gold_oracle", "echo_plugin_oracle", "threshold_oracle"}) {
    TempDir dir;
    auto cfg = testing::mock_fixture(dir.path(), 30, 60, backend);
    cfg.cache_dir = dir / "cache";
    std::string first_json;
    {
      Session s(cfg);
      first_json = report_to_json(s.run(cfg).report).dump(2);
      c.require(s.backend_invocations() > 0, std::string(backend) + ": first run made no calls");
    }
    Session again(cfg);
    const auto second_json = report_to_json(again.run(cfg).report).dump(2);
    c.require(again.backend_invocations() == 0, std::string(backend) + ": cached rerun hit the backend");
    c.require(first_json == second_json, std::string(backend) + ": report JSON differs");
  }
  const CompletionRequest base{"m", "prompt", 16, 0.0, {"\n\n"}};
  std::vector<CompletionRequest> variants(5, base);
  variants[0].model_id = "m2";
  variants[1].prompt = "prompt ";
  variants[2].max_tokens = 17;
  variants[3].temperature = 1e-9;
  variants[4].stop_sequences = {"\n"};
  c.require(CacheKey::of(base) == CacheKey::of(CompletionRequest(base)), "equal requests, different digests");
  for (const auto& v : variants) c.require(!(CacheKey::of(v) == CacheKey::of(base)), "digest ignores a field");
}

// 9. Exact-match label parsing.
void parsing(Check& c) {
  const std::vector<std::string> labels = {"equivalent", "not_equivalent"};
  c.require(parse_label(" not_equivalent\n", labels) == std::optional<std::string>("not_equivalent"), "example 1");
  c.require(!parse_label("NOT_EQUIVALENT", labels), "example 2");
  c.require(!parse_label("Label: equivalent (high confidence)", labels), "example 3");

  // Reference normalization applied to random decorations of labels.
  auto reference = [&](const std::string& s) -> std::optional<std::string> {
    std::string line = s.substr(0, s.find('\n'));
    auto trim = [](std::string x) {
      const char* ws = " \t\r\f\v";
      const auto b = x.find_first_not_of(ws);
      if (b == std::string::npos) return std::string();
      return x.substr(b, x.find_last_not_of(ws) - b + 1);
    };
    line = trim(line);
    if (line.rfind("Label:", 0) == 0) line = trim(line.substr(6));
    for (const auto& l : labels) {
      if (line == l) return l;
    }
    return std::nullopt;
  };
  const std::vector<std::string> pieces = {"", " ", "\t", "\n", "Label:", "Label: ", "equivalent", "not_equivalent",
                                           "Equivalent", ".", "x", "\r\n", "label:"};
  std::mt19937_64 rng(9);
  for (int t = 0; t < 5000; ++t) {
    std::string s;
    const std::size_t k = 1 + rng() % 4;
    for (std::size_t i = 0; i < k; ++i) s += pieces[rng() % pieces.size()];
    const auto got = parse_label(s, labels);
    c.require(got == reference(s), "mismatch on '" + s + "'");
    if (got) c.require(std::find(labels.begin(), labels.end(), *got) != labels.end(), "non-member accepted");
  }
}

struct Criterion {
  const char* name;
  double limit_s;
  std::function<void(Check&)> fn;
};

}  // namespace
}  // namespace sicl

int main() {
  using namespace sicl;
  const std::vector<Criterion> criteria = {
      {"golden prompt fidelity", 1.0, golden_prompt},
      {"oracle equivalence", 5.0, oracle_equivalence},
      {"seed variance", 1.0, variance},
      {"ablation soundness", 5.0, ablation},
      {"budget fitting", 30.0, budget},
      {"override analytics", 10.0, overrides},
      {"metric correctness", 5.0, mcc},
      {"cache and reproducibility", 5.0, cache},
      {"exact-match scoring", 1.0, parsing},
  };
  int failures = 0;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    const auto& cr = criteria[i];
    Check check;
    const auto t0 = std::chrono::steady_clock::now();
    try {
      cr.fn(check);
    } catch (const std::exception& e) {
      check.ok = false;
      check.why = std::string("exception: ") + e.what();
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    if (check.ok && secs >= cr.limit_s) {
      check.ok = false;
      check.why = "too slow";
    }
    failures += !check.ok;
    std::printf("%s %zu %s (%.3f s, limit %.0f s)%s%s\n", check.ok ? "PASS" : "FAIL", i + 1, cr.name, secs,
                cr.limit_s, check.ok ? "" : ": ", check.why.c_str());
  }
  std::printf("%d/%zu criteria passed\n", static_cast<int>(criteria.size()) - failures, criteria.size());
  return failures == 0 ? 0 : 1;
}
