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

// The small task-specific classifier ("plug-in"), seen only through the
// (label, confidence) pairs it produces. Confidence is the classifier's
// probability for the predicted class (maximum class probability); every
// adapter is expected to follow that convention.

#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <map>
#include <memory>
#include <mutex>
#include <string>
#include <unordered_map>

#include "supericl/http.hpp"
#include "supericl/task.hpp"

namespace sicl {

struct PluginPrediction {
  std::string label;
  double confidence = 0.0;

  bool operator==(const PluginPrediction&) const = default;
};

/// Throws ConfidenceOutOfRange or UnknownLabel.
void validate_prediction(const PluginPrediction& pred, const TaskSchema& schema);

enum class PluginAdapter { PredictionsFile, HttpClassifier, CalibratedMock };

struct PluginSpec {
  std::string display_name = "RoBERTa-Large";
  PluginAdapter adapter = PluginAdapter::PredictionsFile;
};

class Plugin {
 public:
  virtual ~Plugin() = default;
  /// Safe to call concurrently. Only `id` and `values` are consulted by
  /// real adapters; the gold label is never read.
  virtual PluginPrediction predict(const LabeledExample& example) const = 0;
};

using PredictionMap = std::unordered_map<std::string, PluginPrediction>;

/// Parses jsonl `{"id", "label", "confidence"}` lines. Labels are checked
/// later, against a schema, by the adapter.
PredictionMap read_predictions(std::istream& in);
PredictionMap load_predictions_file(const std::filesystem::path& path);
void write_predictions(std::ostream& out, const std::vector<std::pair<std::string, PluginPrediction>>& preds);

class PredictionsFilePlugin final : public Plugin {
 public:
  /// Every stored prediction is validated against the schema up front.
  PredictionsFilePlugin(PredictionMap predictions, const TaskSchema& schema);

  PluginPrediction predict(const LabeledExample& example) const override;
  std::size_t size() const { return predictions_.size(); }

 private:
  PredictionMap predictions_;
};

/// POST {origin}/predict with `{"fields": {...}}`, expecting
/// `{"label": str, "confidence": number}`. Non-200 status, malformed JSON,
/// an unknown label or an out-of-range confidence are all BadResponse.
class HttpClassifierPlugin final : public Plugin {
 public:
  HttpClassifierPlugin(std::shared_ptr<HttpTransport> transport, TaskSchema schema,
                       std::ptrdiff_t max_in_flight = 4, std::string path = "/predict");

  PluginPrediction predict(const LabeledExample& example) const override;

 private:
  std::shared_ptr<HttpTransport> transport_;
  TaskSchema schema_;
  std::string path_;
  mutable InFlightLimiter limiter_;
};

enum class ConfidenceProfile { ConstantHigh, NoisyCalibrated };

/// Synthetic classifier for offline runs. For each example id the outcome is
/// a pure function of (id, seed): correct with probability target_accuracy,
/// otherwise a uniformly chosen non-gold label. ConstantHigh reports 0.99;
/// NoisyCalibrated draws from [1/L, 1] with correct predictions skewed high
/// (mean 1/L + 0.75(1 - 1/L)) and wrong ones skewed low (mean 1/L + 0.375(1 - 1/L)).
class CalibratedMockPlugin final : public Plugin {
 public:
  CalibratedMockPlugin(TaskSchema schema, std::map<std::string, std::string> gold_assignment,
                       double target_accuracy, ConfidenceProfile profile, std::uint64_t seed);

  PluginPrediction predict(const LabeledExample& example) const override;

 private:
  TaskSchema schema_;
  std::map<std::string, std::string> gold_;
  double target_accuracy_;
  ConfidenceProfile profile_;
  std::uint64_t seed_;
};

std::unique_ptr<Plugin> make_calibrated_mock(const TaskSchema& schema,
                                             std::map<std::string, std::string> gold_assignment,
                                             double target_accuracy, ConfidenceProfile profile,
                                             std::uint64_t seed);

/// Gold assignment covering every example of the given datasets.
std::map<std::string, std::string> gold_assignment_of(std::initializer_list<const Dataset*> datasets);

/// Computes each id's prediction once and serves later calls from memory,
/// validating every prediction against the schema on the way through.
/// Shared across runs so multi-seed sweeps do not re-query the classifier.
class MemoizedPlugin final : public Plugin {
 public:
  MemoizedPlugin(std::shared_ptr<const Plugin> inner, TaskSchema schema);

  PluginPrediction predict(const LabeledExample& example) const override;
  std::size_t inner_calls() const;

 private:
  std::shared_ptr<const Plugin> inner_;
  TaskSchema schema_;
  mutable std::mutex mu_;
  mutable std::unordered_map<std::string, PluginPrediction> memo_;
  mutable std::size_t inner_calls_ = 0;
};

}  // namespace sicl
