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

// Deterministic offline model. It recognises the harness's own prompt
// templates, answers with a scripted stance per topic and, under argument
// pressure, follows the argument with a configured probability.

#ifndef PRESS_SCRIPTED_BACKEND_HPP_
#define PRESS_SCRIPTED_BACKEND_HPP_

#include <map>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "press/corpus.hpp"
#include "press/gateway.hpp"

namespace press::llm {

struct TopicScript {
  std::string statement_text;
  Direction bias = Direction::Left;
  // Ideological direction of the unpressured answer.
  Direction base_direction = Direction::Left;
  // Probability of answering in the argument's direction under pressure.
  double susceptibility = 0.0;
  // When non-empty, the agent follows an argument exactly when the prompt
  // contains one of these phrases; susceptibility then only drives unpressured
  // sampling.
  std::vector<std::string> yields_to;
  // Persona headers override base_direction when set.
  bool persona_compliant = false;
  // Responses per ideological direction. Empty pools are filled with
  // agree/disagree phrasings of default_pool_size entries.
  std::vector<std::string> left_pool;
  std::vector<std::string> right_pool;
};

enum class ScriptedFailure { None, Unreachable, EmptyGeneration };

struct ScriptedAgentSpec {
  std::string name;
  std::map<std::string, TopicScript> topics;  // keyed by statement id
  int default_pool_size = 1;
  ScriptedFailure failure = ScriptedFailure::None;
};

// Scripted agent from a JSON document (see README) and the corpus, which
// supplies statement text and bias. Topics absent from the document get
// `defaults`.
ScriptedAgentSpec scripted_spec_from_json(const std::string& name, const nlohmann::json& j,
                                          const std::vector<corpus::Statement>& corpus);

std::vector<std::string> default_response_pool(Direction direction, Direction bias, int size);

// Text the scripted generator produces for argument-generation prompts.
std::string scripted_argument(const std::string& statement_text, corpus::ArgumentKind kind,
                              int64_t seed);

class ScriptedBackend : public Backend {
 public:
  explicit ScriptedBackend(ScriptedAgentSpec spec);

  std::string id() const override { return "scripted:" + spec_.name; }
  Capabilities capabilities() override { return {true, true, true}; }
  // Pure in (spec, request). Sample i of a request with seed s equals the
  // single sample of the same request with seed s + i.
  std::vector<Completion> send(const CompletionRequest& request) override;

  const ScriptedAgentSpec& spec() const { return spec_; }

 private:
  Completion respond(const CompletionRequest& request, int64_t seed) const;

  ScriptedAgentSpec spec_;
};

}  // namespace press::llm

#endif  // PRESS_SCRIPTED_BACKEND_HPP_
