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

// Task schemas, labeled datasets and in-context example sampling.

#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <map>
#include <string>
#include <vector>

#include <json.hpp>

namespace sicl {

enum class Metric { Accuracy, MatthewsCorrelation };

struct FieldSpec {
  std::string key;
  std::string display_name;  // printed in prompts, e.g. "Sentence 1"

  bool operator==(const FieldSpec&) const = default;
};

struct TaskSchema {
  std::string task_id;
  std::vector<FieldSpec> input_fields;
  std::vector<std::string> labels;
  Metric metric = Metric::Accuracy;

  bool has_label(std::string_view label) const;
  bool operator==(const TaskSchema&) const = default;
};

/// Throws Error(InvalidSchema) when labels are empty, duplicated or contain
/// a newline, or when input fields are empty or display names repeat.
void validate_schema(const TaskSchema& schema);

TaskSchema schema_from_json(const nlohmann::json& doc);
nlohmann::json schema_to_json(const TaskSchema& schema);
TaskSchema load_schema(const std::filesystem::path& path);

using FieldValues = std::map<std::string, std::string>;

struct LabeledExample {
  std::string id;
  FieldValues values;
  std::string gold_label;

  bool operator==(const LabeledExample&) const = default;
};

struct Dataset {
  std::string schema_id;
  std::string split;
  std::vector<LabeledExample> examples;

  std::size_t size() const { return examples.size(); }
  bool operator==(const Dataset&) const = default;
};

enum class DatasetFormat { Jsonl, Tsv };

DatasetFormat dataset_format_from_string(std::string_view name);
/// Guesses the format from the file extension (".tsv" → Tsv, else Jsonl).
DatasetFormat dataset_format_for(const std::filesystem::path& path);

/// Parses and validates every record. Errors carry the 1-based line number.
Dataset read_dataset(std::istream& in, DatasetFormat format,
                     const TaskSchema& schema, const std::string& split = {});
Dataset load_dataset(const std::filesystem::path& path, DatasetFormat format,
                     const TaskSchema& schema);

void write_dataset(std::ostream& out, const Dataset& dataset,
                   DatasetFormat format, const TaskSchema& schema);
void write_dataset(const std::filesystem::path& path, const Dataset& dataset,
                   DatasetFormat format, const TaskSchema& schema);

/// Draws k distinct examples without replacement. The generator is
/// std::mt19937_64 seeded with `seed`; bounded draws use rejection sampling
/// on the raw 64-bit output (not std::uniform_int_distribution, whose output
/// is implementation-defined), so a given seed yields the same list on every
/// conforming toolchain. The returned order is the draw order.
std::vector<LabeledExample> sample_in_context(const Dataset& dataset,
                                              std::size_t k,
                                              std::uint64_t seed);

enum class ViolationKind { DuplicateId, MissingField, ExtraField, UnknownLabel };

struct Violation {
  ViolationKind kind;
  std::string example_id;
  std::string detail;
};

std::string_view to_string(ViolationKind kind) noexcept;

/// Reports every broken invariant as data; never throws.
std::vector<Violation> validate_dataset(const Dataset& dataset,
                                        const TaskSchema& schema);

}  // namespace sicl
