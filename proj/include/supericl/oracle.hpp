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

// Deterministic stand-ins for the completion model. Each is a pure function
// of the prompt (plus its construction parameters) and never touches the
// network. They answer both the label call and the explanation call.

#pragma once

#include <map>
#include <mutex>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "supericl/llm.hpp"
#include "supericl/prompt.hpp"

namespace sicl {

/// The trailing test block of a label prompt: everything after the last
/// entry separator.
std::string_view last_block(std::string_view prompt, std::string_view separator = "\n\n");

struct ParsedPredictionLine {
  std::string label;
  std::optional<double> confidence;
};

/// Finds the last `... Prediction: <label>[ (Confidence: <c>)]` line in a block.
std::optional<ParsedPredictionLine> parse_prediction_line(std::string_view block);

bool is_explanation_prompt(std::string_view prompt);

/// Answers with the gold label registered for the prompt's test block. The
/// registry is the test-only side channel; an unregistered block is a
/// ProviderError so misuse is loud.
class GoldOracle final : public CompletionBackend {
 public:
  explicit GoldOracle(std::string separator = "\n\n") : separator_(std::move(separator)) {}

  void register_gold(std::string test_block, std::string gold_label);
  CompletionResponse complete(const CompletionRequest& request) override;

 private:
  std::optional<std::string> find_gold(std::string_view prompt) const;

  std::string separator_;
  mutable std::mutex mu_;
  std::map<std::string, std::string, std::less<>> gold_;
};

/// Repeats the plug-in label from the test block's prediction line. Without
/// one (plain ICL prompts) it repeats the last in-context gold label.
class EchoPluginOracle final : public CompletionBackend {
 public:
  explicit EchoPluginOracle(std::string separator = "\n\n", std::string label_cue = "Label:")
      : separator_(std::move(separator)), label_cue_(std::move(label_cue)) {}

  CompletionResponse complete(const CompletionRequest& request) override;

 private:
  std::string separator_;
  std::string label_cue_;
};

/// Follows the plug-in when its confidence is >= threshold and otherwise
/// answers the next label (cyclically, in schema order). A prediction line
/// without a confidence is echoed. With no prediction line at all the answer
/// is a hash of the whole prompt, so it varies with the in-context sample.
class ThresholdOverrideOracle final : public CompletionBackend {
 public:
  ThresholdOverrideOracle(double threshold, std::vector<std::string> labels,
                          std::string separator = "\n\n");

  CompletionResponse complete(const CompletionRequest& request) override;
  double threshold() const { return threshold_; }

 private:
  double threshold_;
  std::vector<std::string> labels_;
  std::string separator_;
};

}  // namespace sicl
