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

#include <algorithm>

#include "press/config.hpp"
#include "press/util.hpp"
#include "press_testing.hpp"

namespace press::runner {
namespace {

nlohmann::json minimal() {
  return nlohmann::json::parse(R"({
    "models": [{"name": "m", "ideology": "left", "backend": {"kind": "scripted"}}],
    "argument_generator": {"kind": "scripted"},
    "nli": {"kind": "keyword"}
  })");
}

bool has_violation(const RunConfig& c, const std::string& needle) {
  const auto v = validate_config(c);
  return std::any_of(v.begin(), v.end(), [&](const std::string& s) { return s.find(needle) != std::string::npos; });
}

TEST(Stages, NamesRoundTripInOrder) {
  const auto& all = all_stages();
  ASSERT_EQ(all.size(), 11u);
  EXPECT_EQ(to_string(all.front()), "arguments");
  EXPECT_EQ(to_string(Stage::FactorAnalysis), "fa");
  for (Stage s : all) EXPECT_EQ(parse_stage(to_string(s)), s);
  EXPECT_FALSE(parse_stage("everything").has_value());
}

TEST(Config, MinimalIsValidWithDefaults) {
  const auto c = parse_config(minimal());
  EXPECT_TRUE(validate_config(c).empty());
  EXPECT_EQ(c.corpus, "political-compass-econ");
  EXPECT_EQ(c.samples, 20);
  EXPECT_EQ(c.variants, 3);
  EXPECT_EQ(c.elicitation_temperature, 0.0);
  EXPECT_EQ(c.stages, all_stages());
  EXPECT_EQ(c.ci, typology::CiMethod::Normal);
}

TEST(Config, ParseErrors) {
  EXPECT_THROW(parse_config(nlohmann::json::array()), ParseError);
  auto unknown = minimal();
  unknown["sample"] = 3;
  EXPECT_THROW(parse_config(unknown), ParseError);
  auto bad_stage = minimal();
  bad_stage["stages"] = {"judging", "dreaming"};
  EXPECT_THROW(parse_config(bad_stage), ParseError);
  auto bad_ideology = minimal();
  bad_ideology["models"][0]["ideology"] = "centre";
  EXPECT_THROW(parse_config(bad_ideology), ParseError);
  auto wrong_type = minimal();
  wrong_type["samples"] = "many";
  EXPECT_THROW(parse_config(wrong_type), ParseError);
  auto ci = minimal();
  ci["ci"] = "bootstrap";
  EXPECT_THROW(parse_config(ci), ParseError);
}

TEST(Config, StagesAreReorderedAndAllExpands) {
  auto j = minimal();
  j["stages"] = {"typology", "judging"};
  EXPECT_EQ(parse_config(j).stages, (std::vector<Stage>{Stage::Judging, Stage::Typology}));
  j["stages"] = {"all"};
  EXPECT_EQ(parse_config(j).stages, all_stages());
}

TEST(Config, RelativePathsResolveAgainstTheConfigFile) {
  testing::TempDir dir;
  auto j = minimal();
  j["output_dir"] = "out";
  j["arguments_file"] = "args.jsonl";
  write_file_atomic(dir / "cfg.json", j.dump());
  const auto c = load_config(dir / "cfg.json");
  EXPECT_EQ(c.output_dir, dir / "out");
  EXPECT_EQ(*c.arguments_file, dir / "args.jsonl");
  EXPECT_TRUE(has_violation(c, "does not exist"));
  write_file_atomic(dir / "bad.json", "{ nope");
  EXPECT_THROW(load_config(dir / "bad.json"), ParseError);
}

TEST(Config, Violations) {
  const auto base = parse_config(minimal());
  auto c = base;
  c.models.clear();
  EXPECT_TRUE(has_violation(c, "at least one model"));
  c = base;
  c.models.push_back(c.models[0]);
  EXPECT_TRUE(has_violation(c, "duplicate model name 'm'"));
  c = base;
  c.models[0].backend.kind = "http";
  EXPECT_TRUE(has_violation(c, "needs base_url"));
  EXPECT_TRUE(has_violation(c, "needs model"));
  c = base;
  c.argument_generator.reset();
  EXPECT_TRUE(has_violation(c, "argument_generator backend or an arguments_file"));
  c = base;
  c.nli.reset();
  EXPECT_TRUE(has_violation(c, "NLI backend is required"));
  c.stages = {Stage::Arguments, Stage::Elicitation};
  EXPECT_FALSE(has_violation(c, "NLI backend is required"));
  c = base;
  c.elicitation_temperature = 0.7;
  EXPECT_TRUE(has_violation(c, "temperatures.elicitation must be 0"));
  c.allow_nonzero_elicitation_temperature = true;
  EXPECT_TRUE(validate_config(c).empty());
  c = base;
  c.samples = 1;
  EXPECT_TRUE(has_violation(c, "N ≥ 2"));
  c = base;
  c.sampling_temperature = 0.0;
  EXPECT_TRUE(has_violation(c, "temperatures.sampling must be positive"));
  c = base;
  c.abstain_threshold = 1.5;
  EXPECT_TRUE(has_violation(c, "abstain_threshold"));
  c = base;
  c.corpus = "/nonexistent/corpus.csv";
  EXPECT_TRUE(has_violation(c, "corpus:"));
}

TEST(Config, CheckpointPairsAndScriptedNli) {
  auto c = parse_config(minimal());
  c.checkpoint_pairs = {{"p", "m", "ghost"}};
  EXPECT_TRUE(has_violation(c, "unknown model 'ghost'"));
  c.checkpoint_pairs = {{"p", "m", "m"}};
  EXPECT_TRUE(has_violation(c, "before and after must differ"));
  c = parse_config(minimal());
  c.nli->kind = "scripted";
  c.nli->script = {{"classes", {{"a"}, nlohmann::json::array()}}};
  EXPECT_TRUE(has_violation(c, "scripted classes"));
  c.nli->script = {{"classes", {{"a", "b"}, {"c"}}}};
  EXPECT_TRUE(validate_config(c).empty());
  c.nli->kind = "oracle";
  EXPECT_TRUE(has_violation(c, "unknown kind 'oracle'"));
}

TEST(Config, ScriptedAgentErrorsSurfaceAsViolations) {
  auto j = minimal();
  j["models"][0]["backend"]["agent"] = {{"topics", {{"not-a-topic", nlohmann::json::object()}}}};
  EXPECT_TRUE(has_violation(parse_config(j), "not-a-topic"));
}

TEST(Config, JsonRoundTrip) {
  auto j = minimal();
  j["samples"] = 7;
  j["persona_grid"] = true;
  j["ci"] = "wilson";
  j["checkpoint_pairs"] = {{{"name", "p"}, {"before", "m"}, {"after", "n"}}};
  j["nli"] = {{"kind", "scripted"}, {"classes", {{"x"}}}};
  const auto c = parse_config(j);
  const auto again = parse_config(to_json(c));
  EXPECT_EQ(to_json(again), to_json(c));
  EXPECT_EQ(again.samples, 7);
  EXPECT_EQ(again.ci, typology::CiMethod::Wilson);
  EXPECT_EQ(again.checkpoint_pairs.size(), 1u);
  EXPECT_EQ(again.nli->script["classes"][0][0], "x");
}

}  // namespace
}  // namespace press::runner
