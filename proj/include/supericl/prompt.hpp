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

// Prompt assembly: context entries, the test block, budget fitting and the
// follow-up explanation prompt.
//
// A context entry renders as
//
//   Sentence 1: <text>
//   Sentence 2: <text>
//   RoBERTa-Large Prediction: equivalent (Confidence: 0.51)
//   Label: not_equivalent
//
// and the test block ends with the bare cue line `Label:` for the model to
// complete. Entries and the test block are joined by one blank line.

#pragma once

#include <cstddef>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <string_view>

#include "supericl/plugin.hpp"
#include "supericl/task.hpp"

namespace sicl {

inline constexpr std::string_view kExplanationCue = "Explanation for overriding the prediction:";

struct PromptConfig {
  bool include_context = true;                      // ablation (a)
  bool include_confidence = true;                   // ablation (b)
  bool include_plugin_prediction_for_test = true;   // ablation (c)
  bool include_plugin_prediction_in_context = true;
  std::string plugin_display_name = "RoBERTa-Large";
  int confidence_decimals = 2;
  std::string entry_separator = "\n\n";
  std::string label_cue = "Label:";

  bool operator==(const PromptConfig&) const = default;
};

/// Throws ConfigError when confidence_decimals < 1 or a display string
/// contains a newline.
void validate_prompt_config(const PromptConfig& cfg);

struct ContextEntry {
  LabeledExample example;
  std::optional<PluginPrediction> plugin_pred;
};

struct RenderedPrompt {
  std::string text;
  std::size_t token_count = 0;
  std::size_t entries_included = 0;
  std::size_t entries_requested = 0;
};

/// Token counter interface. Implementations must be deterministic and
/// monotone under concatenation.
class TokenCounter {
 public:
  virtual ~TokenCounter() = default;
  virtual std::size_t count(std::string_view text) const = 0;
};

/// ceil(bytes / 4). Offline stand-in for a provider tokenizer.
class ByteHeuristicCounter final : public TokenCounter {
 public:
  std::size_t count(std::string_view text) const override { return (text.size() + 3) / 4; }
};

std::size_t count_tokens(std::string_view text, const TokenCounter& counter);

/// Fixed-point rendering, rounded half-up on the decimal expansion (so 0.515
/// at two places gives "0.52" even though the binary double is below it).
std::string format_confidence(double confidence, int decimals);

std::string render_prediction_line(const PluginPrediction& pred, const PromptConfig& cfg);

std::string render_context_entry(const ContextEntry& entry, const TaskSchema& schema,
                                 const PromptConfig& cfg);

std::string render_test_block(const FieldValues& input,
                              const std::optional<PluginPrediction>& plugin_pred,
                              const TaskSchema& schema, const PromptConfig& cfg);

/// Keeps the longest prefix of `context_entries` for which the prompt plus
/// `completion_headroom` fits in `token_budget`. The test block is always
/// present; if it alone does not fit, throws TestBlockTooLarge. With
/// include_context=false the entries are ignored and entries_requested is 0.
RenderedPrompt build_prompt(std::span<const ContextEntry> context_entries,
                            const FieldValues& test_input,
                            const std::optional<PluginPrediction>& plugin_pred,
                            const TaskSchema& schema, const PromptConfig& cfg,
                            std::size_t token_budget, std::size_t completion_headroom,
                            const TokenCounter& counter);

/// `prior_prompt` + " <final_label>\n" + the explanation cue.
std::string render_explanation_prompt(std::string_view prior_prompt, std::string_view final_label);

}  // namespace sicl
