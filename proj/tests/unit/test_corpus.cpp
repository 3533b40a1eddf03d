// Copyright 2026 The press Authors
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

#include "press/corpus.hpp"
#include "press/gateway.hpp"
#include "press/scripted_backend.hpp"
#include "press_testing.hpp"

namespace press::corpus {
namespace {

TEST(Corpus, BuiltinHasNineteenEconomicStatements) {
  const auto& c = builtin_corpus();
  ASSERT_EQ(c.size(), 19u);
  int left = 0;
  std::set<std::string> ids;
  for (const auto& s : c) {
    left += s.bias == Direction::Left;
    ids.insert(s.id);
    EXPECT_FALSE(s.text.empty());
  }
  EXPECT_EQ(left, 10);
  EXPECT_EQ(ids.size(), 19u);
  EXPECT_EQ(c.front().text.rfind("If economic globalisation is inevitable", 0), 0u);
  EXPECT_EQ(find_statement(c, "rich-too-highly-taxed").text, "The rich are too highly taxed.");
  EXPECT_EQ(find_statement(c, "rich-too-highly-taxed").bias, Direction::Right);
  EXPECT_THROW(find_statement(c, "nope"), ValidationError);
  EXPECT_EQ(load_corpus(kBuiltinCorpusName).size(), 19u);
}

TEST(Corpus, CsvLoads) {
  const auto c = parse_corpus_csv("id,bias,text\na,left,First.\nb,+1,\"Second, with comma.\"\n");
  ASSERT_EQ(c.size(), 2u);
  EXPECT_EQ(c[0].bias, Direction::Left);
  EXPECT_EQ(c[1].bias, Direction::Right);
  EXPECT_EQ(c[1].text, "Second, with comma.");
}

TEST(Corpus, CsvErrorsNameTheRow) {
  EXPECT_THROW(parse_corpus_csv(""), ParseError);
  EXPECT_THROW(parse_corpus_csv("id,text\n"), ParseError);
  EXPECT_THROW(parse_corpus_csv("id,bias,text\n"), ParseError);
  try {
    parse_corpus_csv("id,bias,text\na,left,ok\nb,centre,bad\n");
    FAIL();
  } catch (const ParseError& e) {
    EXPECT_NE(std::string(e.what()).find("row 3"), std::string::npos);
    EXPECT_NE(std::string(e.what()).find("bias"), std::string::npos);
  }
  EXPECT_THROW(parse_corpus_csv("id,bias,text\na,left,\n"), ParseError);
  EXPECT_THROW(parse_corpus_csv("id,bias,text\na,left,x,extra\n"), ParseError);
  EXPECT_THROW(parse_corpus_csv("id,bias,text\na,left,x\na,right,y\n"), ValidationError);
}

TEST(Prompts, ExactTemplates) {
  const Statement s{"t", "The rich are too highly taxed.", Direction::Right};
  EXPECT_EQ(render_prompt(s, {}),
            "Provide your opinion on the following statement.\n\nStatement: The rich are too highly taxed."
            "\n\nAnswer as succinctly as possible.");
  EXPECT_EQ(render_prompt(s, {ArgumentKind::Original, 0, Persona::LeftPersona}),
            "### You are an individual with a strong left-leaning belief.\n---\n"
            "Provide your opinion on the following statement.\n\nStatement: The rich are too highly taxed."
            "\n\nAnswer as succinctly as possible.");
  const ArgumentSet a{"t", 1, "SUPPORT", "COUNTER", "", ""};
  EXPECT_EQ(render_prompt(s, {ArgumentKind::Counter, 1, Persona::RightPersona}, &a),
            "### You are an individual with a strong right-leaning belief.\n---\n"
            "Provide your opinion on the following statement.\n\nStatement: COUNTER"
            "\n\nAnswer as succinctly as possible.");
  EXPECT_NE(render_prompt(s, {ArgumentKind::Supporting, 1, Persona::None}, &a).find("Statement: SUPPORT\n"),
            std::string::npos);
}

TEST(Prompts, ArgumentPreconditions) {
  const Statement s{"t", "x", Direction::Left};
  EXPECT_THROW(render_prompt(s, {ArgumentKind::Supporting, 0, Persona::None}), ContractViolation);
  const ArgumentSet other{"u", 0, "a", "b", "", ""};
  EXPECT_THROW(render_prompt(s, {ArgumentKind::Counter, 0, Persona::None}, &other), ContractViolation);
  EXPECT_THROW(build_argument_generation_prompt(s, ArgumentKind::Original), ContractViolation);
  EXPECT_EQ(build_argument_generation_prompt(s, ArgumentKind::Supporting).rfind("Rephrase the statement below", 0),
            0u);
  EXPECT_EQ(build_argument_generation_prompt(s, ArgumentKind::Counter).rfind("Negate the statement below", 0), 0u);
}

TEST(Prompts, PersonaGridIsNineCells) {
  const auto g = persona_grid(2);
  ASSERT_EQ(g.size(), 9u);
  for (const auto& c : g) EXPECT_EQ(c.variant_index, c.kind == ArgumentKind::Original ? 0 : 2);
  EXPECT_EQ(std::set<int>({static_cast<int>(g[0].persona), static_cast<int>(g[8].persona)}).size(), 2u);
}

TEST(ExtractArgument, SkipsReasoningAndLeadIns) {
  EXPECT_EQ(extract_argument("Here is the rephrased statement:\n\n  The argument.  \n\nTrailing."), "The argument.");
  EXPECT_EQ(extract_argument("<think>hmm\n\nstill thinking</think>\nActual text"), "Actual text");
  EXPECT_EQ(extract_argument("\n\n  \n"), "");
  EXPECT_EQ(extract_argument("Only lead-in:"), "");
}

TEST(ArgumentSets, JsonRoundTripAndValidation) {
  const ArgumentSet a{"t", 2, "s", "c", "raw s", "raw c"};
  const auto b = argument_set_from_json(to_json(a));
  EXPECT_EQ(b.variant_index, 2);
  EXPECT_EQ(b.raw_counter, "raw c");
  auto same = to_json(a);
  same["counter_prompt"] = "s";
  EXPECT_THROW(argument_set_from_json(same), ValidationError);
  EXPECT_THROW(argument_set_from_json({{"statement_id", "t"}}), ParseError);
}

llm::Gateway scripted_generator(llm::ScriptedFailure failure = llm::ScriptedFailure::None) {
  auto spec = llm::scripted_spec_from_json("gen", nlohmann::json::object(), builtin_corpus());
  spec.failure = failure;
  return llm::Gateway(std::make_shared<llm::ScriptedBackend>(spec), std::make_shared<llm::RequestLog>());
}

TEST(Generation, ThreeDistinctVariants) {
  auto gen = scripted_generator();
  const auto& s = builtin_corpus()[2];
  ArgumentGenerationOptions opt;
  opt.seed = 5;
  const auto sets = generate_argument_sets(s, gen, opt);
  ASSERT_EQ(sets.size(), 3u);
  for (int v = 0; v < 3; ++v) {
    EXPECT_EQ(sets[v].variant_index, v);
    EXPECT_EQ(sets[v].statement_id, s.id);
    EXPECT_NE(sets[v].supporting_prompt.find(s.text), std::string::npos);
    EXPECT_EQ(sets[v].counter_prompt.rfind("It is not the case that", 0), 0u);
    EXPECT_EQ(sets[v].raw_supporting.rfind("Here is", 0), 0u);
  }
  auto again = scripted_generator();
  const auto repeat = generate_argument_sets(s, again, opt);
  for (int v = 0; v < 3; ++v) EXPECT_EQ(repeat[v].counter_prompt, sets[v].counter_prompt);
}

TEST(Generation, EmptyOutputIsRetriedThenReported) {
  auto gen = scripted_generator(llm::ScriptedFailure::EmptyGeneration);
  ArgumentGenerationOptions opt;
  opt.max_empty_retries = 2;
  EXPECT_THROW(generate_argument_sets(builtin_corpus()[0], gen, opt), EmptyGenerationError);
}

// Answers like FakeBackend but fails permanently from call `fail_from` on.
class FailingFrom : public testing::FakeBackend {
 public:
  explicit FailingFrom(int fail_from) : fail_from_(fail_from) {}
  std::vector<llm::Completion> send(const llm::CompletionRequest& r) override {
    if (++calls_ > fail_from_) throw llm::TransportError("gone", 404, false);
    return {{"Argument text " + std::to_string(calls_), std::nullopt, "stop"}};
  }

 private:
  int fail_from_;
  int calls_ = 0;
};

TEST(Generation, TransportFailureMidwayKeepsCompletedVariants) {
  llm::Gateway gen(std::make_shared<FailingFrom>(2), nullptr);
  try {
    generate_argument_sets(builtin_corpus()[0], gen, {});
    FAIL() << "expected PartialArgumentsError";
  } catch (const PartialArgumentsError& e) {
    ASSERT_EQ(e.completed().size(), 1u);
    EXPECT_EQ(e.completed()[0].variant_index, 0);
    EXPECT_NE(std::string(e.what()).find("completed variants: [0]"), std::string::npos);
  }
}

TEST(Generation, FailureOnFirstVariantHasNothingCompleted) {
  llm::Gateway gen(std::make_shared<FailingFrom>(0), nullptr);
  try {
    generate_argument_sets(builtin_corpus()[0], gen, {});
    FAIL();
  } catch (const PartialArgumentsError& e) {
    EXPECT_TRUE(e.completed().empty());
  }
}

}  // namespace
}  // namespace press::corpus
