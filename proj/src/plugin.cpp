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

#include "supericl/plugin.hpp"

#include <cmath>
#include <fstream>
#include <random>

#include <json.hpp>

#include "supericl/error.hpp"
#include "util.hpp"

namespace sicl {

using json = nlohmann::json;

void validate_prediction(const PluginPrediction& pred, const TaskSchema& schema) {
  if (!(pred.confidence >= 0.0 && pred.confidence <= 1.0)) {
    throw Error(ErrorCode::ConfidenceOutOfRange, detail::shortest_repr(pred.confidence));
  }
  if (!schema.has_label(pred.label)) {
    throw Error(ErrorCode::UnknownLabel, "plug-in predicted '" + pred.label + "'");
  }
}

PredictionMap read_predictions(std::istream& in) {
  PredictionMap out;
  std::string text;
  std::size_t line = 0;
  while (std::getline(in, text)) {
    ++line;
    if (detail::trim(text).empty()) continue;
    const auto where = "line " + std::to_string(line);
    std::string id;
    PluginPrediction pred;
    try {
      const auto obj = json::parse(text);
      const auto& id_field = obj.at("id");
      id = id_field.is_string() ? id_field.get<std::string>()
                                : std::to_string(id_field.get<long long>());
      pred.label = obj.at("label").get<std::string>();
      pred.confidence = obj.at("confidence").get<double>();
    } catch (const json::exception& e) {
      throw Error(ErrorCode::MalformedRecord, where + ": " + e.what());
    }
    if (!(pred.confidence >= 0.0 && pred.confidence <= 1.0)) {
      throw Error(ErrorCode::ConfidenceOutOfRange,
                  where + ": " + detail::shortest_repr(pred.confidence));
    }
    if (!out.emplace(id, std::move(pred)).second) {
      throw Error(ErrorCode::DuplicateId, where + ": '" + id + "'");
    }
  }
  return out;
}

PredictionMap load_predictions_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::IoError, "cannot open predictions file " + path.string());
  try {
    return read_predictions(in);
  } catch (const Error& e) {
    throw Error(e.code(), path.string() + ": " + e.detail());
  }
}

void write_predictions(std::ostream& out,
                       const std::vector<std::pair<std::string, PluginPrediction>>& preds) {
  for (const auto& [id, pred] : preds) {
    out << json{{"id", id}, {"label", pred.label}, {"confidence", pred.confidence}}.dump() << '\n';
  }
}

PredictionsFilePlugin::PredictionsFilePlugin(PredictionMap predictions, const TaskSchema& schema)
    : predictions_(std::move(predictions)) {
  for (const auto& [id, pred] : predictions_) {
    try {
      validate_prediction(pred, schema);
    } catch (const Error& e) {
      throw Error(e.code(), "prediction for '" + id + "': " + e.detail());
    }
  }
}

PluginPrediction PredictionsFilePlugin::predict(const LabeledExample& example) const {
  auto it = predictions_.find(example.id);
  if (it == predictions_.end()) throw Error(ErrorCode::MissingPrediction, example.id);
  return it->second;
}

HttpClassifierPlugin::HttpClassifierPlugin(std::shared_ptr<HttpTransport> transport,
                                           TaskSchema schema, std::ptrdiff_t max_in_flight,
                                           std::string path)
    : transport_(std::move(transport)),
      schema_(std::move(schema)),
      path_(std::move(path)),
      limiter_(max_in_flight) {}

PluginPrediction HttpClassifierPlugin::predict(const LabeledExample& example) const {
  json fields = json::object();
  for (const auto& field : schema_.input_fields) fields[field.key] = example.values.at(field.key);
  const auto body = json{{"fields", fields}}.dump();

  HttpResponse resp;
  {
    auto slot = limiter_.acquire();
    resp = transport_->post_json(path_, body, {});
  }
  if (resp.status != 200) {
    throw Error(ErrorCode::BadResponse, "classifier returned HTTP " + std::to_string(resp.status) +
                                            " for '" + example.id + "'");
  }
  PluginPrediction pred;
  try {
    const auto obj = json::parse(resp.body);
    pred.label = obj.at("label").get<std::string>();
    pred.confidence = obj.at("confidence").get<double>();
  } catch (const json::exception& e) {
    throw Error(ErrorCode::BadResponse, "classifier body for '" + example.id + "': " + e.what());
  }
  try {
    validate_prediction(pred, schema_);
  } catch (const Error& e) {
    throw Error(ErrorCode::BadResponse, "classifier for '" + example.id + "': " + e.what());
  }
  return pred;
}

CalibratedMockPlugin::CalibratedMockPlugin(TaskSchema schema,
                                           std::map<std::string, std::string> gold_assignment,
                                           double target_accuracy, ConfidenceProfile profile,
                                           std::uint64_t seed)
    : schema_(std::move(schema)),
      gold_(std::move(gold_assignment)),
      target_accuracy_(target_accuracy),
      profile_(profile),
      seed_(seed) {
  if (!(target_accuracy >= 0.0 && target_accuracy <= 1.0)) {
    throw Error(ErrorCode::ConfigError,
                "target_accuracy must lie in [0, 1], got " + detail::shortest_repr(target_accuracy));
  }
}

PluginPrediction CalibratedMockPlugin::predict(const LabeledExample& example) const {
  auto it = gold_.find(example.id);
  if (it == gold_.end()) throw Error(ErrorCode::MissingPrediction, example.id);
  const std::string& gold = it->second;

  std::mt19937_64 rng(detail::splitmix64(detail::fnv1a64(example.id) ^ detail::splitmix64(seed_)));
  const bool correct = detail::unit_real(rng) < target_accuracy_ || schema_.labels.size() < 2;

  PluginPrediction pred;
  if (correct) {
    pred.label = gold;
  } else {
    std::vector<const std::string*> others;
    for (const auto& l : schema_.labels) {
      if (l != gold) others.push_back(&l);
    }
    pred.label = *others[detail::uniform_below(rng, others.size())];
  }

  if (profile_ == ConfidenceProfile::ConstantHigh) {
    pred.confidence = 0.99;
  } else {
    const double floor = 1.0 / static_cast<double>(schema_.labels.size());
    const double u = detail::unit_real(rng);
    const double spread = correct ? 0.5 + 0.5 * u : 0.75 * u;
    pred.confidence = std::min(1.0, floor + (1.0 - floor) * spread);
  }
  return pred;
}

std::unique_ptr<Plugin> make_calibrated_mock(const TaskSchema& schema,
                                             std::map<std::string, std::string> gold_assignment,
                                             double target_accuracy, ConfidenceProfile profile,
                                             std::uint64_t seed) {
  return std::make_unique<CalibratedMockPlugin>(schema, std::move(gold_assignment),
                                                target_accuracy, profile, seed);
}

std::map<std::string, std::string> gold_assignment_of(
    std::initializer_list<const Dataset*> datasets) {
  std::map<std::string, std::string> out;
  for (const Dataset* ds : datasets) {
    for (const auto& ex : ds->examples) {
      auto [it, inserted] = out.emplace(ex.id, ex.gold_label);
      if (!inserted && it->second != ex.gold_label) {
        throw Error(ErrorCode::DuplicateId,
                    "id '" + ex.id + "' carries different gold labels across datasets");
      }
    }
  }
  return out;
}

MemoizedPlugin::MemoizedPlugin(std::shared_ptr<const Plugin> inner, TaskSchema schema)
    : inner_(std::move(inner)), schema_(std::move(schema)) {}

PluginPrediction MemoizedPlugin::predict(const LabeledExample& example) const {
  {
    std::lock_guard lock(mu_);
    if (auto it = memo_.find(example.id); it != memo_.end()) return it->second;
  }
  // Computed outside the lock so slow remote adapters can overlap.
  auto pred = inner_->predict(example);
  validate_prediction(pred, schema_);
  std::lock_guard lock(mu_);
  ++inner_calls_;
  return memo_.emplace(example.id, std::move(pred)).first->second;
}

std::size_t MemoizedPlugin::inner_calls() const {
  std::lock_guard lock(mu_);
  return inner_calls_;
}

}  // namespace sicl
