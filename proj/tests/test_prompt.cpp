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

#include <random>

#include "test_support.hpp"

namespace sicl {
namespace {

using testing::data_path;
using testing::mrpc_schema;

struct MrpcDemo {
  TaskSchema schema = mrpc_schema();
  std::vector<ContextEntry> context;
  LabeledExample test;
  PluginPrediction test_pred;

  MrpcDemo() {
    const auto ctx = load_dataset(data_path("mrpc_demo_context.jsonl"), DatasetFormat::Jsonl, schema);
    const auto tst = load_dataset(data_path("mrpc_demo_test.jsonl"), DatasetFormat::Jsonl, schema);
    const auto preds = load_predictions_file(data_path("mrpc_demo_predictions.jsonl"));
    for (const auto& ex : ctx.examples) context.push_back({ex, preds.at(ex.id)});
    test = tst.examples.at(0);
    test_pred = preds.at(test.id);
  }
};

std::size_t tokens(const std::string& s) { return (s.size() + 3) / 4; }

TEST(FormatConfidence, HalfUpOnDecimalExpansion) {
  EXPECT_EQ(format_confidence(0.51, 2), "0.51");
  EXPECT_EQ(format_confidence(0.98, 2), "0.98");
  EXPECT_EQ(format_confidence(0.5, 2), "0.50");
  EXPECT_EQ(format_confidence(1.0, 2), "1.00");
  EXPECT_EQ(format_confidence(0.515, 2), "0.52");
  EXPECT_EQ(format_confidence(0.994999, 2), "0.99");
  EXPECT_EQ(format_confidence(0.995, 2), "1.00");
  EXPECT_EQ(format_confidence(0.0, 2), "0.00");
  EXPECT_EQ(format_confidence(0.8234, 3), "0.823");
}

TEST(RenderContextEntry, MrpcDemoFirstEntry) {
  MrpcDemo t;
  EXPECT_EQ(render_context_entry(t.context[0], t.schema, PromptConfig{}),
            "Sentence 1: Federal agent Bill Polychronopoulos said it was not known if the man, 30, would be "
            "charged.\n"
            "Sentence 2: Federal Agent Bill Polychronopoulos said last night the man involved in the "
            "Melbourne incident had been unarmed.\n"
            "RoBERTa-Large Prediction: equivalent (Confidence: 0.51)\n"
            "Label: not_equivalent");
}

TEST(RenderContextEntry, WithoutConfidence) {
  MrpcDemo t;
  PromptConfig cfg;
  cfg.include_confidence = false;
  const auto text = render_context_entry(t.context[0], t.schema, cfg);
  EXPECT_NE(text.find("\nRoBERTa-Large Prediction: equivalent\nLabel: not_equivalent"), std::string::npos);
  EXPECT_EQ(text.find("Confidence"), std::string::npos);
}

TEST(RenderContextEntry, PlainIclEntry) {
  MrpcDemo t;
  PromptConfig cfg;
  cfg.include_plugin_prediction_in_context = false;
  const auto lines = testing::lines_of(render_context_entry(t.context[0], t.schema, cfg));
  ASSERT_EQ(lines.size(), 3u);
  EXPECT_EQ(lines[0].rfind("Sentence 1: ", 0), 0u);
  EXPECT_EQ(lines[1].rfind("Sentence 2: ", 0), 0u);
  EXPECT_EQ(lines[2], "Label: not_equivalent");
}

TEST(RenderTestBlock, MrpcDemoTestInput) {
  MrpcDemo t;
  EXPECT_EQ(render_test_block(t.test.values, t.test_pred, t.schema, PromptConfig{}),
            "Sentence 1: Cooley said he expects Muhammad will similarly be called as a witness at a "
            "pretrial hearing for Malvo.\n"
            "Sentence 2: Lee Boyd Malvo will be called as a witness Wednesday in a pretrial hearing for "
            "fellow sniper suspect John Allen Muhammad.\n"
            "RoBERTa-Large Prediction: equivalent (Confidence: 0.82)\n"
            "Label:");
}

TEST(RenderTestBlock, NoPrediction) {
  MrpcDemo t;
  const auto lines = testing::lines_of(render_test_block(t.test.values, std::nullopt, t.schema, PromptConfig{}));
  ASSERT_EQ(lines.size(), 3u);
  EXPECT_EQ(lines[2], "Label:");
}

TEST(RenderTestBlock, SingleFieldSchema) {
  const auto schema = testing::sst2_schema();
  EXPECT_EQ(render_test_block({{"sentence", "a gripping film"}}, PluginPrediction{"positive", 0.9}, schema,
                              PromptConfig{}),
            "Sentence: a gripping film\nRoBERTa-Large Prediction: positive (Confidence: 0.90)\nLabel:");
}

TEST(RenderTestBlock, DisplayNameIsConfigurable) {
  const auto schema = testing::sst2_schema();
  PromptConfig cfg;
  cfg.plugin_display_name = "TinyBERT";
  EXPECT_EQ(render_prediction_line({"negative", 0.734}, cfg), "TinyBERT Prediction: negative (Confidence: 0.73)");
}

TEST(BuildPrompt, MrpcDemoGolden) {
  MrpcDemo t;
  const auto p = build_prompt(t.context, t.test.values, t.test_pred, t.schema, PromptConfig{}, 4096, 128,
                              ByteHeuristicCounter{});
  EXPECT_EQ(p.text, testing::read_file(data_path("mrpc_demo_golden_prompt.txt")));
  EXPECT_EQ(p.entries_included, 2u);
  EXPECT_EQ(p.entries_requested, 2u);
  EXPECT_EQ(p.token_count, tokens(p.text));
}

TEST(BuildPrompt, HugeBudgetKeepsEverything) {
  MrpcDemo t;
  const auto p = build_prompt(t.context, t.test.values, t.test_pred, t.schema, PromptConfig{}, 1'000'000, 128,
                              ByteHeuristicCounter{});
  EXPECT_EQ(p.entries_included, p.entries_requested);
}

TEST(BuildPrompt, BudgetExactlyTestBlock) {
  MrpcDemo t;
  const auto block = render_test_block(t.test.values, t.test_pred, t.schema, PromptConfig{});
  const auto p = build_prompt(t.context, t.test.values, t.test_pred, t.schema, PromptConfig{},
                              tokens(block) + 128, 128, ByteHeuristicCounter{});
  EXPECT_EQ(p.entries_included, 0u);
  EXPECT_EQ(p.entries_requested, 2u);
  EXPECT_EQ(p.text, block);
}

TEST(BuildPrompt, TestBlockTooLarge) {
  MrpcDemo t;
  try {
    build_prompt(t.context, t.test.values, t.test_pred, t.schema, PromptConfig{}, 140, 128, ByteHeuristicCounter{});
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::TestBlockTooLarge);
  }
}

TEST(BuildPrompt, NoContextFlagDropsEntries) {
  MrpcDemo t;
  PromptConfig cfg;
  cfg.include_context = false;
  const auto p = build_prompt(t.context, t.test.values, t.test_pred, t.schema, cfg, 4096, 128, ByteHeuristicCounter{});
  EXPECT_EQ(p.entries_requested, 0u);
  EXPECT_EQ(p.text, render_test_block(t.test.values, t.test_pred, t.schema, cfg));
}

TEST(ExplanationPrompt, MrpcDemo) {
  const auto prior = testing::read_file(data_path("mrpc_demo_golden_prompt.txt"));
  const auto e = render_explanation_prompt(prior, "not_equivalent");
  EXPECT_EQ(e.rfind(prior, 0), 0u);
  const std::string tail = "Label: not_equivalent\nExplanation for overriding the prediction:";
  ASSERT_GE(e.size(), tail.size());
  EXPECT_EQ(e.substr(e.size() - tail.size()), tail);
}

TEST(ExplanationPrompt, LabelsDifferOnlyInLabelToken) {
  const std::string prior = "x\nLabel:";
  const auto a = render_explanation_prompt(prior, "equivalent");
  const auto b = render_explanation_prompt(prior, "not_equivalent");
  EXPECT_NE(a, b);
  EXPECT_EQ(a, prior + " equivalent\n" + std::string(kExplanationCue));
  EXPECT_EQ(b, prior + " not_equivalent\n" + std::string(kExplanationCue));
}

TEST(CountTokens, Heuristic) {
  ByteHeuristicCounter c;
  EXPECT_EQ(count_tokens("", c), 0u);
  EXPECT_EQ(count_tokens(std::string(400, 'a'), c), 100u);
  EXPECT_EQ(count_tokens(std::string(401, 'a'), c), 101u);
}

TEST(CountTokens, MonotoneUnderConcatenation) {
  ByteHeuristicCounter c;
  std::mt19937_64 rng(1);
  for (int i = 0; i < 500; ++i) {
    const std::string a(rng() % 300, 'x'), b(rng() % 300, 'y');
    EXPECT_GE(count_tokens(a + b, c), count_tokens(a, c));
  }
}

TEST(PromptConfig, Validation) {
  PromptConfig cfg;
  cfg.confidence_decimals = 0;
  EXPECT_THROW(validate_prompt_config(cfg), Error);
  cfg = PromptConfig{};
  cfg.plugin_display_name = "a\nb";
  EXPECT_THROW(validate_prompt_config(cfg), Error);
}

TEST(BuildPrompt, NineOfSixteenMatchesBruteForce) {
  const auto f = testing::nine_of_sixteen();
  const PromptConfig cfg;
  const auto expected = testing::max_feasible_prefix(f.entries, f.test_input, f.test_pred, f.schema, cfg, 4096, 128);
  ASSERT_EQ(expected, std::optional<std::size_t>(9));
  const auto p = build_prompt(f.entries, f.test_input, f.test_pred, f.schema, cfg, 4096, 128, ByteHeuristicCounter{});
  EXPECT_EQ(p.entries_included, 9u);
  EXPECT_EQ(p.entries_requested, 16u);
  EXPECT_LE(p.token_count + 128, 4096u);
}

TEST(BuildPrompt, RandomFixturesAgreeWithBruteForce) {
  std::mt19937_64 rng(2024);
  const auto schema = mrpc_schema();
  const PromptConfig cfg;
  for (int trial = 0; trial < 200; ++trial) {
    std::vector<ContextEntry> entries;
    const std::size_t n = rng() % 12;
    for (std::size_t i = 0; i < n; ++i) {
      entries.push_back({{"r" + std::to_string(i),
                          {{"sentence1", std::string(rng() % 400, 'p')}, {"sentence2", std::string(rng() % 50, 'q')}},
                          schema.labels[rng() % 2]},
                         PluginPrediction{schema.labels[rng() % 2], 0.5}});
    }
    const FieldValues input{{"sentence1", std::string(rng() % 200, 't')}, {"sentence2", "u"}};
    const std::size_t headroom = rng() % 64;
    const std::size_t budget = headroom + 1 + rng() % 800;
    const auto expected = testing::max_feasible_prefix(entries, input, std::nullopt, schema, cfg, budget, headroom);
    if (!expected) {
      EXPECT_THROW(build_prompt(entries, input, std::nullopt, schema, cfg, budget, headroom, ByteHeuristicCounter{}),
                   Error);
      continue;
    }
    const auto p = build_prompt(entries, input, std::nullopt, schema, cfg, budget, headroom, ByteHeuristicCounter{});
    EXPECT_EQ(p.entries_included, *expected);
    EXPECT_LE(p.token_count + headroom, budget);
  }
}

}  // namespace
}  // namespace sicl
