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

#include "supericl/eval.hpp"

#include <algorithm>
#include <cmath>
#include <ostream>

#include "supericl/error.hpp"
#include "util.hpp"

namespace sicl {

using json = nlohmann::json;

std::optional<std::string> parse_label(std::string_view completion,
                                       std::span<const std::string> labels) {
  constexpr std::string_view prefix = "Label:";
  std::string_view text = detail::trim(completion.substr(0, completion.find('\n')));
  if (text.starts_with(prefix)) text = detail::trim(text.substr(prefix.size()));
  if (std::find(labels.begin(), labels.end(), text) == labels.end()) return std::nullopt;
  return std::string(text);
}

bool is_override(const PredictionRecord& record) {
  return record.plugin_pred && record.final_label && *record.final_label != record.plugin_pred->label;
}

PredictionRecord make_record(std::string id, std::string gold,
                             std::optional<PluginPrediction> plugin_pred,
                             std::optional<std::string> final_label, std::string raw_completion) {
  PredictionRecord r{std::move(id), std::move(gold), std::move(plugin_pred),
                     std::move(final_label), std::move(raw_completion), false, std::nullopt};
  r.overridden = is_override(r);
  return r;
}

double accuracy(std::span<const PredictionRecord> records) {
  if (records.empty()) throw Error(ErrorCode::EmptyRecords, "accuracy of zero records");
  const auto correct = std::count_if(records.begin(), records.end(),
                                     [](const PredictionRecord& r) { return r.correct(); });
  return static_cast<double>(correct) / static_cast<double>(records.size());
}

double matthews_corr(std::span<const PredictionRecord> records,
                     std::span<const std::string> labels) {
  if (labels.size() != 2) {
    throw Error(ErrorCode::NotBinaryTask, std::to_string(labels.size()) + " labels");
  }
  if (records.empty()) throw Error(ErrorCode::EmptyRecords, "MCC of zero records");
  const std::string& positive = labels[0];
  double tp = 0, tn = 0, fp = 0, fn = 0;
  for (const auto& r : records) {
    const bool gold_pos = r.gold == positive;
    const bool pred_pos = r.final_label ? *r.final_label == positive : !gold_pos;
    if (gold_pos && pred_pos) ++tp;
    else if (!gold_pos && !pred_pos) ++tn;
    else if (pred_pos) ++fp;
    else ++fn;
  }
  const double denom = std::sqrt((tp + fp) * (tp + fn) * (tn + fp) * (tn + fn));
  if (denom == 0.0) return 0.0;
  return (tp * tn - fp * fn) / denom;
}

OverrideStats override_stats(std::span<const PredictionRecord> records) {
  if (records.empty()) throw Error(ErrorCode::EmptyRecords, "override stats of zero records");
  std::size_t overridden = 0, overridden_correct = 0;
  for (const auto& r : records) {
    if (!r.plugin_pred) throw Error(ErrorCode::MissingPluginPrediction, r.id);
    if (is_override(r)) {
      ++overridden;
      if (r.correct()) ++overridden_correct;
    }
  }
  OverrideStats out;
  out.pct_overridden = static_cast<double>(overridden) / static_cast<double>(records.size());
  if (overridden > 0) {
    out.overridden_accuracy =
        static_cast<double>(overridden_correct) / static_cast<double>(overridden);
  }
  return out;
}

std::vector<HistogramBin> confidence_histogram(std::span<const PredictionRecord> records,
                                               double bin_width) {
  if (!(bin_width > 0.0 && bin_width <= 1.0)) {
    throw Error(ErrorCode::BadBinWidth, detail::shortest_repr(bin_width));
  }
  const double ratio = 1.0 / bin_width;
  const auto bins = static_cast<std::size_t>(std::llround(ratio));
  if (std::abs(ratio - static_cast<double>(bins)) > 1e-9 * ratio) {
    throw Error(ErrorCode::BadBinWidth, detail::shortest_repr(bin_width) + " does not divide 1");
  }
  std::vector<HistogramBin> out(bins);
  for (std::size_t i = 0; i < bins; ++i) {
    out[i].lower = static_cast<double>(i) / static_cast<double>(bins);
  }
  for (const auto& r : records) {
    if (!r.plugin_pred) throw Error(ErrorCode::MissingPluginPrediction, r.id);
    // The epsilon keeps values such as 0.7 out of the bin below when
    // 0.7 * 10 lands at 6.999...
    const double scaled = r.plugin_pred->confidence * static_cast<double>(bins) + 1e-9;
    auto idx = static_cast<std::size_t>(std::max(0.0, std::floor(scaled)));
    idx = std::min(idx, bins - 1);
    ++out[idx].count_all;
    if (is_override(r)) ++out[idx].count_overridden;
  }
  return out;
}

double variance_across_seeds(std::span<const double> values) {
  if (values.size() < 2) {
    throw Error(ErrorCode::TooFewValues, "need at least 2 values, got " + std::to_string(values.size()));
  }
  double mean = 0.0;
  for (double v : values) mean += v;
  mean /= static_cast<double>(values.size());
  double ss = 0.0;
  for (double v : values) ss += (v - mean) * (v - mean);
  return ss / static_cast<double>(values.size() - 1);
}

EvalReport build_report(std::vector<PredictionRecord> records, const TaskSchema& schema,
                        double bin_width) {
  EvalReport report;
  report.n = records.size();
  report.bin_width = bin_width;
  report.accuracy = accuracy(records);
  if (schema.labels.size() == 2) report.mcc = matthews_corr(records, schema.labels);

  std::size_t overridden = 0, overridden_correct = 0;
  for (const auto& r : records) {
    if (r.overridden) {
      ++overridden;
      if (r.correct()) ++overridden_correct;
    }
  }
  report.pct_overridden = static_cast<double>(overridden) / static_cast<double>(report.n);
  if (overridden > 0) {
    report.overridden_accuracy =
        static_cast<double>(overridden_correct) / static_cast<double>(overridden);
  }
  const bool all_have_plugin = std::all_of(records.begin(), records.end(),
                                           [](const PredictionRecord& r) { return r.plugin_pred.has_value(); });
  if (all_have_plugin) report.histogram = confidence_histogram(records, bin_width);
  report.records = std::move(records);
  return report;
}

namespace {

template <typename T>
json opt_json(const std::optional<T>& v) {
  return v ? json(*v) : json(nullptr);
}

template <typename T>
std::optional<T> opt_from(const json& doc, const char* key) {
  auto it = doc.find(key);
  if (it == doc.end() || it->is_null()) return std::nullopt;
  return it->get<T>();
}

}  // namespace

json report_to_json(const EvalReport& report) {
  json records = json::array();
  for (const auto& r : report.records) {
    json plugin = nullptr;
    if (r.plugin_pred) plugin = {{"label", r.plugin_pred->label}, {"confidence", r.plugin_pred->confidence}};
    records.push_back({{"id", r.id},
                       {"gold", r.gold},
                       {"plugin_pred", plugin},
                       {"final_label", opt_json(r.final_label)},
                       {"raw_completion", r.raw_completion},
                       {"overridden", r.overridden},
                       {"explanation", opt_json(r.explanation)}});
  }
  json histogram = json::array();
  for (const auto& b : report.histogram) {
    histogram.push_back({{"bin_lower", b.lower},
                         {"count_all", b.count_all},
                         {"count_overridden", b.count_overridden}});
  }
  return {{"n", report.n},
          {"accuracy", report.accuracy},
          {"mcc", opt_json(report.mcc)},
          {"pct_overridden", report.pct_overridden},
          {"overridden_accuracy", opt_json(report.overridden_accuracy)},
          {"bin_width", report.bin_width},
          {"histogram", histogram},
          {"records", records}};
}

EvalReport report_from_json(const json& doc) {
  EvalReport report;
  report.n = doc.at("n").get<std::size_t>();
  report.accuracy = doc.at("accuracy").get<double>();
  report.mcc = opt_from<double>(doc, "mcc");
  report.pct_overridden = doc.at("pct_overridden").get<double>();
  report.overridden_accuracy = opt_from<double>(doc, "overridden_accuracy");
  report.bin_width = doc.at("bin_width").get<double>();
  for (const auto& b : doc.at("histogram")) {
    report.histogram.push_back({b.at("bin_lower").get<double>(), b.at("count_all").get<std::size_t>(),
                                b.at("count_overridden").get<std::size_t>()});
  }
  for (const auto& r : doc.at("records")) {
    PredictionRecord rec;
    rec.id = r.at("id").get<std::string>();
    rec.gold = r.at("gold").get<std::string>();
    if (const auto& p = r.at("plugin_pred"); !p.is_null()) {
      rec.plugin_pred = PluginPrediction{p.at("label").get<std::string>(), p.at("confidence").get<double>()};
    }
    rec.final_label = opt_from<std::string>(r, "final_label");
    rec.raw_completion = r.at("raw_completion").get<std::string>();
    rec.overridden = r.at("overridden").get<bool>();
    rec.explanation = opt_from<std::string>(r, "explanation");
    report.records.push_back(std::move(rec));
  }
  return report;
}

namespace {

std::string csv_cell(std::string_view v) {
  if (v.find_first_of(",\"\r\n") == std::string_view::npos) return std::string(v);
  std::string out = "\"";
  for (char c : v) {
    if (c == '"') out += '"';
    out += c;
  }
  out += '"';
  return out;
}

}  // namespace

void write_records_csv(std::ostream& out, const EvalReport& report) {
  out << "id,gold,plugin_label,plugin_confidence,final_label,overridden,correct,raw_completion,"
         "explanation\n";
  for (const auto& r : report.records) {
    out << csv_cell(r.id) << ',' << csv_cell(r.gold) << ','
        << (r.plugin_pred ? csv_cell(r.plugin_pred->label) : "") << ','
        << (r.plugin_pred ? detail::shortest_repr(r.plugin_pred->confidence) : "") << ','
        << (r.final_label ? csv_cell(*r.final_label) : "") << ',' << (r.overridden ? 1 : 0) << ','
        << (r.correct() ? 1 : 0) << ',' << csv_cell(r.raw_completion) << ','
        << (r.explanation ? csv_cell(*r.explanation) : "") << '\n';
  }
}

void write_histogram_csv(std::ostream& out, const EvalReport& report) {
  out << "bin_lower,count_all,count_overridden\n";
  for (const auto& b : report.histogram) {
    out << detail::shortest_repr(b.lower) << ',' << b.count_all << ',' << b.count_overridden << '\n';
  }
}

}  // namespace sicl
