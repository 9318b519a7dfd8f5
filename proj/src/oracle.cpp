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

#include "supericl/oracle.hpp"

#include <algorithm>
#include <charconv>

#include "supericl/error.hpp"
#include "util.hpp"

namespace sicl {

namespace {

constexpr std::string_view kPredictionMarker = " Prediction: ";
constexpr std::string_view kConfidenceOpen = " (Confidence: ";

CompletionResponse make_response(const CompletionRequest& request, std::string text) {
  ByteHeuristicCounter counter;
  CompletionResponse out;
  out.prompt_tokens = counter.count(request.prompt);
  out.completion_tokens = counter.count(text);
  out.text = std::move(text);
  return out;
}

}  // namespace

std::string_view last_block(std::string_view prompt, std::string_view separator) {
  const auto pos = prompt.rfind(separator);
  if (pos == std::string_view::npos) return prompt;
  return prompt.substr(pos + separator.size());
}

std::optional<ParsedPredictionLine> parse_prediction_line(std::string_view block) {
  std::optional<ParsedPredictionLine> found;
  for (const auto& line : detail::split(block, '\n')) {
    const auto marker = line.find(kPredictionMarker);
    if (marker == std::string::npos) continue;
    std::string_view rest = std::string_view(line).substr(marker + kPredictionMarker.size());
    ParsedPredictionLine parsed;
    const auto open = rest.find(kConfidenceOpen);
    if (open != std::string_view::npos && rest.ends_with(")")) {
      auto number = rest.substr(open + kConfidenceOpen.size());
      number.remove_suffix(1);
      double value = 0.0;
      auto [ptr, ec] = std::from_chars(number.data(), number.data() + number.size(), value);
      if (ec == std::errc{} && ptr == number.data() + number.size()) {
        parsed.confidence = value;
        rest = rest.substr(0, open);
      }
    }
    parsed.label = std::string(rest);
    found = std::move(parsed);
  }
  return found;
}

bool is_explanation_prompt(std::string_view prompt) { return prompt.ends_with(kExplanationCue); }

void GoldOracle::register_gold(std::string test_block, std::string gold_label) {
  std::lock_guard lock(mu_);
  gold_.insert_or_assign(std::move(test_block), std::move(gold_label));
}

std::optional<std::string> GoldOracle::find_gold(std::string_view prompt) const {
  std::lock_guard lock(mu_);
  if (auto it = gold_.find(last_block(prompt, separator_)); it != gold_.end()) return it->second;
  // Field text may itself contain the separator; fall back to a suffix scan.
  for (const auto& [block, gold] : gold_) {
    if (prompt.ends_with(block)) return gold;
  }
  return std::nullopt;
}

CompletionResponse GoldOracle::complete(const CompletionRequest& request) {
  if (is_explanation_prompt(request.prompt)) {
    return make_response(request, " The reference answer for this input is the gold label.");
  }
  auto gold = find_gold(request.prompt);
  if (!gold) throw Error(ErrorCode::ProviderError, "gold oracle: unregistered test block");
  return make_response(request, " " + *gold);
}

CompletionResponse EchoPluginOracle::complete(const CompletionRequest& request) {
  if (is_explanation_prompt(request.prompt)) {
    return make_response(request, " The plug-in prediction was kept.");
  }
  const auto block = last_block(request.prompt, separator_);
  if (auto pred = parse_prediction_line(block)) return make_response(request, " " + pred->label);

  // Plain ICL prompt: repeat the most recent in-context label.
  const std::string_view context = request.prompt.substr(0, request.prompt.size() - block.size());
  const std::string needle = "\n" + label_cue_ + " ";
  const auto pos = context.rfind(needle);
  if (pos == std::string_view::npos) return make_response(request, "");
  auto tail = context.substr(pos + needle.size());
  tail = tail.substr(0, tail.find('\n'));
  return make_response(request, " " + std::string(tail));
}

ThresholdOverrideOracle::ThresholdOverrideOracle(double threshold, std::vector<std::string> labels,
                                                 std::string separator)
    : threshold_(threshold), labels_(std::move(labels)), separator_(std::move(separator)) {
  if (labels_.empty()) throw Error(ErrorCode::ConfigError, "threshold oracle needs labels");
}

CompletionResponse ThresholdOverrideOracle::complete(const CompletionRequest& request) {
  if (is_explanation_prompt(request.prompt)) {
    return make_response(request, " The plug-in confidence is below " +
                                      detail::shortest_repr(threshold_) +
                                      ", so its prediction was overridden.");
  }
  const auto block = last_block(request.prompt, separator_);
  const auto pred = parse_prediction_line(block);
  if (!pred) {
    const auto pick = detail::splitmix64(detail::fnv1a64(request.prompt)) % labels_.size();
    return make_response(request, " " + labels_[pick]);
  }
  if (!pred->confidence || *pred->confidence >= threshold_) {
    return make_response(request, " " + pred->label);
  }
  auto it = std::find(labels_.begin(), labels_.end(), pred->label);
  const std::size_t next = it == labels_.end() ? 0 : (it - labels_.begin() + 1) % labels_.size();
  return make_response(request, " " + labels_[next]);
}

}  // namespace sicl
