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

// Label parsing, exact-match scoring and the aggregate statistics of a run.

#pragma once

#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "supericl/plugin.hpp"
#include "supericl/task.hpp"

namespace sicl {

/// First line, trimmed, with one optional leading "Label:" removed (and the
/// whitespace after it); the result must be byte-identical to a label.
/// nullopt means Unparseable.
std::optional<std::string> parse_label(std::string_view completion,
                                       std::span<const std::string> labels);

struct PredictionRecord {
  std::string id;
  std::string gold;
  std::optional<PluginPrediction> plugin_pred;
  std::optional<std::string> final_label;
  std::string raw_completion;
  bool overridden = false;
  std::optional<std::string> explanation;

  bool correct() const { return final_label && *final_label == gold; }
  bool operator==(const PredictionRecord&) const = default;
};

/// plugin_pred and final_label both present and different.
bool is_override(const PredictionRecord& record);

/// Builds a record with `overridden` derived from the other fields.
PredictionRecord make_record(std::string id, std::string gold,
                             std::optional<PluginPrediction> plugin_pred,
                             std::optional<std::string> final_label, std::string raw_completion);

double accuracy(std::span<const PredictionRecord> records);

/// Binary MCC with labels[0] as the positive class. An unparseable final
/// label counts as the class opposite to gold. Zero denominator gives 0.0.
double matthews_corr(std::span<const PredictionRecord> records,
                     std::span<const std::string> labels);

struct OverrideStats {
  double pct_overridden = 0.0;
  std::optional<double> overridden_accuracy;
};

OverrideStats override_stats(std::span<const PredictionRecord> records);

struct HistogramBin {
  double lower = 0.0;
  std::size_t count_all = 0;
  std::size_t count_overridden = 0;

  bool operator==(const HistogramBin&) const = default;
};

/// Bins [i*w, (i+1)*w) for i < 1/w, the last bin closed at 1.0. bin_width
/// must divide 1 into a whole number of bins.
std::vector<HistogramBin> confidence_histogram(std::span<const PredictionRecord> records,
                                               double bin_width);

/// Sample variance (n - 1 denominator).
double variance_across_seeds(std::span<const double> values);

struct EvalReport {
  std::size_t n = 0;
  double accuracy = 0.0;
  std::optional<double> mcc;
  double pct_overridden = 0.0;
  std::optional<double> overridden_accuracy;
  double bin_width = 0.05;
  std::vector<HistogramBin> histogram;
  std::vector<PredictionRecord> records;

  bool operator==(const EvalReport&) const = default;
};

/// Aggregates a finished run. MCC is filled for binary tasks; the histogram
/// only when every record carries a plug-in prediction.
EvalReport build_report(std::vector<PredictionRecord> records, const TaskSchema& schema,
                        double bin_width = 0.05);

nlohmann::json report_to_json(const EvalReport& report);
EvalReport report_from_json(const nlohmann::json& doc);

void write_records_csv(std::ostream& out, const EvalReport& report);
void write_histogram_csv(std::ostream& out, const EvalReport& report);

}  // namespace sicl
