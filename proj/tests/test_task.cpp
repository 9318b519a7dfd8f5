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


#include <gtest/gtest.h>

#include <set>
#include <sstream>

#include "test_support.hpp"

namespace sicl {
namespace {

using testing::mrpc_schema;

Dataset parse_jsonl(const std::string& text, const TaskSchema& schema) {
  std::istringstream in(text);
  return read_dataset(in, DatasetFormat::Jsonl, schema, "test");
}

ErrorCode error_of(const std::function<void()>& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.code();
  }
  ADD_FAILURE() << "expected an Error";
  return ErrorCode::IoError;
}

TEST(Schema, LoadsMrpc) {
  const auto s = mrpc_schema();
  EXPECT_EQ(s.task_id, "mrpc");
  ASSERT_EQ(s.input_fields.size(), 2u);
  EXPECT_EQ(s.input_fields[1].display_name, "Sentence 2");
  EXPECT_TRUE(s.has_label("not_equivalent"));
  EXPECT_FALSE(s.has_label("Not_equivalent"));
}

TEST(Schema, RejectsEmptyLabelsAndDuplicates) {
  auto s = mrpc_schema();
  s.labels.clear();
  EXPECT_EQ(error_of([&] { validate_schema(s); }), ErrorCode::InvalidSchema);
  s = mrpc_schema();
  s.labels = {"a", "a"};
  EXPECT_EQ(error_of([&] { validate_schema(s); }), ErrorCode::InvalidSchema);
  s = mrpc_schema();
  s.input_fields.push_back(s.input_fields[0]);
  EXPECT_EQ(error_of([&] { validate_schema(s); }), ErrorCode::InvalidSchema);
}

TEST(Schema, JsonRoundTrip) {
  const auto s = mrpc_schema();
  EXPECT_EQ(schema_from_json(schema_to_json(s)), s);
}

TEST(LoadDataset, MinimalJsonlRecord) {
  const auto d = parse_jsonl(
      R"({"id":"1","sentence1":"a","sentence2":"b","label":"equivalent"})" "\n", mrpc_schema());
  ASSERT_EQ(d.size(), 1u);
  EXPECT_EQ(d.examples[0].id, "1");
  EXPECT_EQ(d.examples[0].values.at("sentence1"), "a");
  EXPECT_EQ(d.examples[0].gold_label, "equivalent");
}

TEST(LoadDataset, UnknownLabel) {
  EXPECT_EQ(error_of([] {
              parse_jsonl(R"({"id":"1","sentence1":"a","sentence2":"b","label":"maybe"})", mrpc_schema());
            }),
            ErrorCode::UnknownLabel);
}

TEST(LoadDataset, MissingFieldAndMalformedLine) {
  EXPECT_EQ(error_of([] { parse_jsonl(R"({"id":"1","sentence1":"a","label":"equivalent"})", mrpc_schema()); }),
            ErrorCode::MissingField);
  EXPECT_EQ(error_of([] { parse_jsonl("{not json}\n", mrpc_schema()); }), ErrorCode::MalformedRecord);
}

TEST(LoadDataset, DuplicateIdIsRejected) {
  const std::string line = R"({"id":"1","sentence1":"a","sentence2":"b","label":"equivalent"})";
  EXPECT_EQ(error_of([&] { parse_jsonl(line + "\n" + line + "\n", mrpc_schema()); }), ErrorCode::DuplicateId);
}

TEST(LoadDataset, TsvKeepsFileOrder) {
  const auto d = load_dataset(testing::data_path("mrpc_small.tsv"), DatasetFormat::Tsv, mrpc_schema());
  const std::vector<LabeledExample> expected = {
      {"a", {{"sentence1", "The cat sat."}, {"sentence2", "A cat was sitting."}}, "equivalent"},
      {"b", {{"sentence1", "Stocks fell sharply."}, {"sentence2", "The market rallied."}}, "not_equivalent"},
      {"c", {{"sentence1", "He left early."}, {"sentence2", "He departed ahead of time."}}, "equivalent"},
  };
  EXPECT_EQ(d.examples, expected);
}

TEST(LoadDataset, TsvColumnMismatch) {
  std::istringstream in("sentence1\tsentence2\tlabel\nonly\tequivalent\n");
  EXPECT_EQ(error_of([&] { read_dataset(in, DatasetFormat::Tsv, mrpc_schema()); }), ErrorCode::MalformedRecord);
}

TEST(LoadDataset, FormatFromExtension) {
  EXPECT_EQ(dataset_format_for("x/train.jsonl"), DatasetFormat::Jsonl);
  EXPECT_EQ(dataset_format_for("dev.tsv"), DatasetFormat::Tsv);
}

TEST(LoadDataset, WriteReadRoundTripBothFormats) {
  const auto schema = mrpc_schema();
  const auto d = testing::synthetic_dataset("x", 50, 11);
  for (auto fmt : {DatasetFormat::Jsonl, DatasetFormat::Tsv}) {
    std::stringstream buf;
    write_dataset(buf, d, fmt, schema);
    const auto back = read_dataset(buf, fmt, schema, d.split);
    EXPECT_EQ(back.examples, d.examples);
  }
}

TEST(LoadDataset, Utf8SurvivesRoundTrip) {
  const auto schema = mrpc_schema();
  Dataset d{"mrpc", "x", {{"t", {{"sentence1", "ภาษาไทย ทดสอบ"}, {"sentence2", "Ünïcödé “quotes”"}}, "equivalent"}}};
  std::stringstream buf;
  write_dataset(buf, d, DatasetFormat::Jsonl, schema);
  EXPECT_EQ(read_dataset(buf, DatasetFormat::Jsonl, schema).examples, d.examples);
}

TEST(SampleInContext, ZeroGivesEmpty) {
  EXPECT_TRUE(sample_in_context(testing::synthetic_dataset("c", 10, 1), 0, 42).empty());
}

TEST(SampleInContext, TooLarge) {
  EXPECT_EQ(error_of([] { sample_in_context(testing::synthetic_dataset("c", 10, 1), 11, 42); }),
            ErrorCode::KTooLarge);
}

TEST(SampleInContext, DeterministicPerSeed) {
  const auto d = testing::synthetic_dataset("c", 100, 1);
  EXPECT_EQ(sample_in_context(d, 32, 42), sample_in_context(d, 32, 42));
}

TEST(SampleInContext, DistinctMembersFromDataset) {
  const auto d = testing::synthetic_dataset("c", 100, 1);
  const auto s = sample_in_context(d, 32, 7);
  std::set<std::string> ids;
  for (const auto& ex : s) {
    ids.insert(ex.id);
    EXPECT_NE(std::find(d.examples.begin(), d.examples.end(), ex), d.examples.end());
  }
  EXPECT_EQ(ids.size(), 32u);
}

TEST(SampleInContext, SeedsGiveDifferentSelections) {
  const auto d = testing::synthetic_dataset("c", 100, 1);
  std::vector<std::set<std::string>> sets;
  for (std::uint64_t seed : {42, 0, 1, 2, 3}) {
    std::set<std::string> ids;
    for (const auto& ex : sample_in_context(d, 32, seed)) ids.insert(ex.id);
    sets.push_back(ids);
  }
  std::size_t differing = 0;
  for (std::size_t i = 0; i < sets.size(); ++i) {
    for (std::size_t j = i + 1; j < sets.size(); ++j) differing += sets[i] != sets[j];
  }
  EXPECT_GE(differing, 1u);
}

TEST(SampleInContext, WholeDatasetIsPermutation) {
  const auto d = testing::synthetic_dataset("c", 20, 1);
  auto s = sample_in_context(d, 20, 5);
  auto by_id = [](const LabeledExample& a, const LabeledExample& b) { return a.id < b.id; };
  auto expected = d.examples;
  std::sort(s.begin(), s.end(), by_id);
  std::sort(expected.begin(), expected.end(), by_id);
  EXPECT_EQ(s, expected);
}

TEST(ValidateDataset, CleanFixture) {
  EXPECT_TRUE(validate_dataset(testing::synthetic_dataset("c", 10, 1), mrpc_schema()).empty());
}

TEST(ValidateDataset, DuplicateId) {
  auto d = testing::synthetic_dataset("c", 3, 1);
  d.examples[2].id = d.examples[0].id;
  const auto v = validate_dataset(d, mrpc_schema());
  ASSERT_EQ(v.size(), 1u);
  EXPECT_EQ(v[0].kind, ViolationKind::DuplicateId);
}

TEST(ValidateDataset, MissingField) {
  auto d = testing::synthetic_dataset("c", 3, 1);
  d.examples[1].values.erase("sentence2");
  const auto v = validate_dataset(d, mrpc_schema());
  ASSERT_EQ(v.size(), 1u);
  EXPECT_EQ(v[0].kind, ViolationKind::MissingField);
  EXPECT_EQ(v[0].example_id, "c1");
}

TEST(ValidateDataset, ExtraFieldAndUnknownLabel) {
  auto d = testing::synthetic_dataset("c", 3, 1);
  d.examples[0].values["extra"] = "x";
  d.examples[2].gold_label = "maybe";
  const auto v = validate_dataset(d, mrpc_schema());
  ASSERT_EQ(v.size(), 2u);
  EXPECT_EQ(v[0].kind, ViolationKind::ExtraField);
  EXPECT_EQ(v[1].kind, ViolationKind::UnknownLabel);
}

TEST(Errors, CategoriesDriveExitCodes) {
  EXPECT_EQ(category_of(ErrorCode::ConfigError), ErrorCategory::Config);
  EXPECT_EQ(category_of(ErrorCode::UnknownLabel), ErrorCategory::Data);
  EXPECT_EQ(category_of(ErrorCode::RateLimited), ErrorCategory::Provider);
  EXPECT_EQ(category_of(ErrorCode::CacheCorrupt), ErrorCategory::Io);
  EXPECT_STREQ(Error(ErrorCode::KTooLarge, "k=9").what(), "KTooLarge: k=9");
}

}  // namespace
}  // namespace sicl
