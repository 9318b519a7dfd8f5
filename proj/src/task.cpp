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

#include "supericl/task.hpp"

#include <algorithm>
#include <fstream>
#include <numeric>
#include <optional>
#include <random>
#include <set>
#include <sstream>
#include <unordered_set>

#include "supericl/error.hpp"
#include "util.hpp"

namespace sicl {

using json = nlohmann::json;

bool TaskSchema::has_label(std::string_view label) const {
  return std::find(labels.begin(), labels.end(), label) != labels.end();
}

void validate_schema(const TaskSchema& schema) {
  if (schema.labels.empty()) {
    throw Error(ErrorCode::InvalidSchema, "task '" + schema.task_id + "' has no labels");
  }
  std::set<std::string_view> seen;
  for (const auto& label : schema.labels) {
    if (label.empty() || label.find_first_of("\r\n") != std::string::npos) {
      throw Error(ErrorCode::InvalidSchema, "label '" + label + "' is empty or contains a newline");
    }
    if (!seen.insert(label).second) {
      throw Error(ErrorCode::InvalidSchema, "duplicate label '" + label + "'");
    }
  }
  if (schema.input_fields.empty()) {
    throw Error(ErrorCode::InvalidSchema, "task '" + schema.task_id + "' has no input fields");
  }
  std::set<std::string_view> keys, names;
  for (const auto& field : schema.input_fields) {
    if (field.key.empty() || field.key == "id" || field.key == "label") {
      throw Error(ErrorCode::InvalidSchema, "invalid field key '" + field.key + "'");
    }
    if (field.display_name.empty() || field.display_name.find_first_of("\r\n") != std::string::npos) {
      throw Error(ErrorCode::InvalidSchema, "bad display name for field '" + field.key + "'");
    }
    if (!keys.insert(field.key).second) {
      throw Error(ErrorCode::InvalidSchema, "duplicate field key '" + field.key + "'");
    }
    if (!names.insert(field.display_name).second) {
      throw Error(ErrorCode::InvalidSchema, "duplicate display name '" + field.display_name + "'");
    }
  }
}

namespace {

Metric metric_from_string(const std::string& name) {
  if (name == "accuracy") return Metric::Accuracy;
  if (name == "mcc" || name == "matthews_correlation") return Metric::MatthewsCorrelation;
  throw Error(ErrorCode::InvalidSchema, "unknown metric '" + name + "'");
}

}  // namespace

TaskSchema schema_from_json(const json& doc) {
  TaskSchema schema;
  try {
    schema.task_id = doc.at("task_id").get<std::string>();
    for (const auto& field : doc.at("input_fields")) {
      schema.input_fields.push_back(
          {field.at("key").get<std::string>(), field.at("display_name").get<std::string>()});
    }
    schema.labels = doc.at("labels").get<std::vector<std::string>>();
    schema.metric = metric_from_string(doc.value("metric", std::string("accuracy")));
  } catch (const json::exception& e) {
    throw Error(ErrorCode::InvalidSchema, e.what());
  }
  validate_schema(schema);
  return schema;
}

json schema_to_json(const TaskSchema& schema) {
  json fields = json::array();
  for (const auto& f : schema.input_fields) {
    fields.push_back({{"key", f.key}, {"display_name", f.display_name}});
  }
  return {{"task_id", schema.task_id},
          {"input_fields", fields},
          {"labels", schema.labels},
          {"metric", schema.metric == Metric::Accuracy ? "accuracy" : "mcc"}};
}

TaskSchema load_schema(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::IoError, "cannot open schema file " + path.string());
  json doc;
  try {
    doc = json::parse(in);
  } catch (const json::exception& e) {
    throw Error(ErrorCode::InvalidSchema, path.string() + ": " + e.what());
  }
  return schema_from_json(doc);
}

DatasetFormat dataset_format_from_string(std::string_view name) {
  if (name == "jsonl") return DatasetFormat::Jsonl;
  if (name == "tsv") return DatasetFormat::Tsv;
  throw Error(ErrorCode::ConfigError, "unknown dataset format '" + std::string(name) + "'");
}

DatasetFormat dataset_format_for(const std::filesystem::path& path) {
  return path.extension() == ".tsv" ? DatasetFormat::Tsv : DatasetFormat::Jsonl;
}

namespace {

std::string at_line(std::size_t line, const std::string& what) {
  return "line " + std::to_string(line) + ": " + what;
}

void check_label(const TaskSchema& schema, const std::string& label, std::size_t line) {
  if (!schema.has_label(label)) {
    throw Error(ErrorCode::UnknownLabel, at_line(line, "'" + label + "'"));
  }
}

std::string json_scalar_to_string(const json& v, std::size_t line, const std::string& key) {
  if (v.is_string()) return v.get<std::string>();
  if (v.is_number_integer()) return std::to_string(v.get<long long>());
  throw Error(ErrorCode::MalformedRecord, at_line(line, "'" + key + "' must be a string"));
}

LabeledExample parse_jsonl_record(const std::string& text, const TaskSchema& schema,
                                  std::size_t line) {
  json obj;
  try {
    obj = json::parse(text);
  } catch (const json::parse_error& e) {
    throw Error(ErrorCode::MalformedRecord, at_line(line, e.what()));
  }
  if (!obj.is_object()) {
    throw Error(ErrorCode::MalformedRecord, at_line(line, "record is not a JSON object"));
  }
  LabeledExample ex;
  if (!obj.contains("id")) throw Error(ErrorCode::MalformedRecord, at_line(line, "missing 'id'"));
  ex.id = json_scalar_to_string(obj["id"], line, "id");
  for (const auto& field : schema.input_fields) {
    auto it = obj.find(field.key);
    if (it == obj.end()) throw Error(ErrorCode::MissingField, at_line(line, field.key));
    if (!it->is_string()) {
      throw Error(ErrorCode::MalformedRecord, at_line(line, "'" + field.key + "' must be a string"));
    }
    ex.values.emplace(field.key, it->get<std::string>());
  }
  auto label = obj.find("label");
  if (label == obj.end()) throw Error(ErrorCode::MissingField, at_line(line, "label"));
  if (!label->is_string()) {
    throw Error(ErrorCode::MalformedRecord, at_line(line, "'label' must be a string"));
  }
  ex.gold_label = label->get<std::string>();
  check_label(schema, ex.gold_label, line);
  return ex;
}

void add_unique(Dataset& ds, LabeledExample ex, std::unordered_set<std::string>& ids,
                std::size_t line) {
  if (!ids.insert(ex.id).second) {
    throw Error(ErrorCode::DuplicateId, at_line(line, "'" + ex.id + "'"));
  }
  ds.examples.push_back(std::move(ex));
}

void read_jsonl(std::istream& in, const TaskSchema& schema, Dataset& ds) {
  std::unordered_set<std::string> ids;
  std::string text;
  std::size_t line = 0;
  while (std::getline(in, text)) {
    ++line;
    if (!text.empty() && text.back() == '\r') text.pop_back();
    if (detail::trim(text).empty()) continue;
    add_unique(ds, parse_jsonl_record(text, schema, line), ids, line);
  }
}

void read_tsv(std::istream& in, const TaskSchema& schema, Dataset& ds) {
  std::string text;
  if (!std::getline(in, text)) return;
  if (!text.empty() && text.back() == '\r') text.pop_back();
  const auto header = detail::split(text, '\t');
  auto column_of = [&](std::string_view key) -> std::optional<std::size_t> {
    auto it = std::find(header.begin(), header.end(), key);
    if (it == header.end()) return std::nullopt;
    return static_cast<std::size_t>(it - header.begin());
  };
  std::vector<std::size_t> field_cols;
  for (const auto& field : schema.input_fields) {
    auto col = column_of(field.key);
    if (!col) throw Error(ErrorCode::MissingField, at_line(1, field.key));
    field_cols.push_back(*col);
  }
  auto label_col = column_of("label");
  if (!label_col) throw Error(ErrorCode::MissingField, at_line(1, "label"));
  auto id_col = column_of("id");

  std::unordered_set<std::string> ids;
  std::size_t line = 1;
  while (std::getline(in, text)) {
    ++line;
    if (!text.empty() && text.back() == '\r') text.pop_back();
    if (text.empty()) continue;
    const auto cells = detail::split(text, '\t');
    if (cells.size() != header.size()) {
      throw Error(ErrorCode::MalformedRecord,
                  at_line(line, "expected " + std::to_string(header.size()) + " columns, got " +
                                    std::to_string(cells.size())));
    }
    LabeledExample ex;
    ex.id = id_col ? cells[*id_col] : std::to_string(ds.examples.size() + 1);
    for (std::size_t i = 0; i < field_cols.size(); ++i) {
      ex.values.emplace(schema.input_fields[i].key, cells[field_cols[i]]);
    }
    ex.gold_label = cells[*label_col];
    check_label(schema, ex.gold_label, line);
    add_unique(ds, std::move(ex), ids, line);
  }
}

}  // namespace

Dataset read_dataset(std::istream& in, DatasetFormat format, const TaskSchema& schema,
                     const std::string& split) {
  Dataset ds{schema.task_id, split, {}};
  if (format == DatasetFormat::Jsonl) {
    read_jsonl(in, schema, ds);
  } else {
    read_tsv(in, schema, ds);
  }
  return ds;
}

Dataset load_dataset(const std::filesystem::path& path, DatasetFormat format,
                     const TaskSchema& schema) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::IoError, "cannot open dataset " + path.string());
  try {
    return read_dataset(in, format, schema, path.stem().string());
  } catch (const Error& e) {
    throw Error(e.code(), path.string() + ": " + e.detail());
  }
}

void write_dataset(std::ostream& out, const Dataset& dataset, DatasetFormat format,
                   const TaskSchema& schema) {
  if (format == DatasetFormat::Jsonl) {
    for (const auto& ex : dataset.examples) {
      json obj = json::object();
      obj["id"] = ex.id;
      for (const auto& field : schema.input_fields) obj[field.key] = ex.values.at(field.key);
      obj["label"] = ex.gold_label;
      out << obj.dump() << '\n';
    }
    return;
  }
  auto cell = [](const std::string& v, const std::string& id) -> const std::string& {
    if (v.find_first_of("\t\r\n") != std::string::npos) {
      throw Error(ErrorCode::MalformedRecord,
                  "example '" + id + "' has a tab or newline, not representable in tsv");
    }
    return v;
  };
  out << "id";
  for (const auto& field : schema.input_fields) out << '\t' << field.key;
  out << "\tlabel\n";
  for (const auto& ex : dataset.examples) {
    out << cell(ex.id, ex.id);
    for (const auto& field : schema.input_fields) out << '\t' << cell(ex.values.at(field.key), ex.id);
    out << '\t' << ex.gold_label << '\n';
  }
}

void write_dataset(const std::filesystem::path& path, const Dataset& dataset,
                   DatasetFormat format, const TaskSchema& schema) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error(ErrorCode::IoError, "cannot write " + path.string());
  write_dataset(out, dataset, format, schema);
}

std::vector<LabeledExample> sample_in_context(const Dataset& dataset, std::size_t k,
                                              std::uint64_t seed) {
  const std::size_t n = dataset.size();
  if (k > n) {
    throw Error(ErrorCode::KTooLarge,
                "requested " + std::to_string(k) + " examples from a dataset of " + std::to_string(n));
  }
  std::mt19937_64 rng(seed);
  std::vector<std::size_t> index(n);
  std::iota(index.begin(), index.end(), std::size_t{0});
  std::vector<LabeledExample> out;
  out.reserve(k);
  // Partial Fisher-Yates: position i receives a uniform draw from the
  // not-yet-chosen tail.
  for (std::size_t i = 0; i < k; ++i) {
    const auto j = i + static_cast<std::size_t>(detail::uniform_below(rng, n - i));
    std::swap(index[i], index[j]);
    out.push_back(dataset.examples[index[i]]);
  }
  return out;
}

std::string_view to_string(ViolationKind kind) noexcept {
  switch (kind) {
    case ViolationKind::DuplicateId: return "DuplicateId";
    case ViolationKind::MissingField: return "MissingField";
    case ViolationKind::ExtraField: return "ExtraField";
    case ViolationKind::UnknownLabel: return "UnknownLabel";
  }
  return "?";
}

std::vector<Violation> validate_dataset(const Dataset& dataset, const TaskSchema& schema) {
  std::vector<Violation> out;
  std::unordered_set<std::string> ids;
  for (const auto& ex : dataset.examples) {
    if (!ids.insert(ex.id).second) {
      out.push_back({ViolationKind::DuplicateId, ex.id, "id appears more than once"});
    }
    for (const auto& field : schema.input_fields) {
      if (!ex.values.contains(field.key)) {
        out.push_back({ViolationKind::MissingField, ex.id, field.key});
      }
    }
    for (const auto& [key, _] : ex.values) {
      const bool known = std::any_of(schema.input_fields.begin(), schema.input_fields.end(),
                                     [&](const FieldSpec& f) { return f.key == key; });
      if (!known) out.push_back({ViolationKind::ExtraField, ex.id, key});
    }
    if (!schema.has_label(ex.gold_label)) {
      out.push_back({ViolationKind::UnknownLabel, ex.id, ex.gold_label});
    }
  }
  return out;
}

}  // namespace sicl
