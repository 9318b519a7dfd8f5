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

#include "supericl/prompt.hpp"

#include <array>
#include <charconv>
#include <vector>

#include "supericl/error.hpp"
#include "util.hpp"

namespace sicl {

void validate_prompt_config(const PromptConfig& cfg) {
  if (cfg.confidence_decimals < 1) {
    throw Error(ErrorCode::ConfigError, "confidence_decimals must be >= 1");
  }
  if (cfg.plugin_display_name.empty() ||
      cfg.plugin_display_name.find_first_of("\r\n") != std::string::npos) {
    throw Error(ErrorCode::ConfigError, "plugin display name must be non-empty, single-line");
  }
  if (cfg.label_cue.find_first_of("\r\n") != std::string::npos) {
    throw Error(ErrorCode::ConfigError, "label cue must be single-line");
  }
}

std::size_t count_tokens(std::string_view text, const TokenCounter& counter) {
  return counter.count(text);
}

std::string format_confidence(double confidence, int decimals) {
  std::array<char, 400> buf{};
  auto [end, ec] = std::to_chars(buf.data(), buf.data() + buf.size(), confidence,
                                 std::chars_format::fixed);
  if (ec != std::errc{}) throw Error(ErrorCode::ConfigError, "unformattable confidence");
  std::string digits(buf.data(), end);
  const bool negative = !digits.empty() && digits.front() == '-';
  if (negative) digits.erase(0, 1);

  const auto dot = digits.find('.');
  std::string int_part = digits.substr(0, dot);
  std::string frac = dot == std::string::npos ? std::string() : digits.substr(dot + 1);
  const auto places = static_cast<std::size_t>(decimals);

  bool round_up = frac.size() > places && frac[places] >= '5';
  frac.resize(places, '0');
  // Propagate the carry through the kept fraction digits, then the integer part.
  for (auto it = frac.rbegin(); round_up && it != frac.rend(); ++it) {
    if (*it == '9') {
      *it = '0';
    } else {
      ++*it;
      round_up = false;
    }
  }
  for (auto it = int_part.rbegin(); round_up && it != int_part.rend(); ++it) {
    if (*it == '9') {
      *it = '0';
    } else {
      ++*it;
      round_up = false;
    }
  }
  if (round_up) int_part.insert(int_part.begin(), '1');
  return (negative ? "-" : "") + int_part + "." + frac;
}

std::string render_prediction_line(const PluginPrediction& pred, const PromptConfig& cfg) {
  std::string line = cfg.plugin_display_name + " Prediction: " + pred.label;
  if (cfg.include_confidence) {
    line += " (Confidence: " + format_confidence(pred.confidence, cfg.confidence_decimals) + ")";
  }
  return line;
}

namespace {

void append_fields(std::string& out, const FieldValues& values, const TaskSchema& schema) {
  for (const auto& field : schema.input_fields) {
    out += field.display_name;
    out += ": ";
    if (auto it = values.find(field.key); it != values.end()) out += it->second;
    out += '\n';
  }
}

}  // namespace

std::string render_context_entry(const ContextEntry& entry, const TaskSchema& schema,
                                 const PromptConfig& cfg) {
  std::string out;
  append_fields(out, entry.example.values, schema);
  if (cfg.include_plugin_prediction_in_context && entry.plugin_pred) {
    out += render_prediction_line(*entry.plugin_pred, cfg);
    out += '\n';
  }
  out += cfg.label_cue;
  out += ' ';
  out += entry.example.gold_label;
  return out;
}

std::string render_test_block(const FieldValues& input,
                              const std::optional<PluginPrediction>& plugin_pred,
                              const TaskSchema& schema, const PromptConfig& cfg) {
  std::string out;
  append_fields(out, input, schema);
  if (cfg.include_plugin_prediction_for_test && plugin_pred) {
    out += render_prediction_line(*plugin_pred, cfg);
    out += '\n';
  }
  out += cfg.label_cue;
  return out;
}

RenderedPrompt build_prompt(std::span<const ContextEntry> context_entries,
                            const FieldValues& test_input,
                            const std::optional<PluginPrediction>& plugin_pred,
                            const TaskSchema& schema, const PromptConfig& cfg,
                            std::size_t token_budget, std::size_t completion_headroom,
                            const TokenCounter& counter) {
  if (token_budget <= completion_headroom) {
    throw Error(ErrorCode::ConfigError, "token budget " + std::to_string(token_budget) +
                                            " leaves no room beyond headroom " +
                                            std::to_string(completion_headroom));
  }
  if (!cfg.include_context) context_entries = {};

  const std::string test_block = render_test_block(test_input, plugin_pred, schema, cfg);
  const std::size_t limit = token_budget - completion_headroom;

  RenderedPrompt out;
  out.entries_requested = context_entries.size();
  out.text = test_block;
  out.token_count = counter.count(out.text);
  if (out.token_count > limit) {
    throw Error(ErrorCode::TestBlockTooLarge, "test block needs " + std::to_string(out.token_count) +
                                                  " tokens, limit is " + std::to_string(limit));
  }

  // Grow the prefix one entry at a time and stop at the first that overflows.
  std::string context;
  for (std::size_t m = 0; m < context_entries.size(); ++m) {
    context += render_context_entry(context_entries[m], schema, cfg);
    context += cfg.entry_separator;
    std::string candidate = context + test_block;
    const std::size_t tokens = counter.count(candidate);
    if (tokens > limit) break;
    out.text = std::move(candidate);
    out.token_count = tokens;
    out.entries_included = m + 1;
  }
  return out;
}

std::string render_explanation_prompt(std::string_view prior_prompt, std::string_view final_label) {
  std::string out(prior_prompt);
  out += ' ';
  out += final_label;
  out += '\n';
  out += kExplanationCue;
  return out;
}

}  // namespace sicl
