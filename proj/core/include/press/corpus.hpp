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

// Statement corpus, prompt templates and argument-set generation.

#ifndef PRESS_CORPUS_HPP_
#define PRESS_CORPUS_HPP_

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json.hpp>

#include "press/common.hpp"

namespace press {
namespace llm {
class Gateway;
}

namespace corpus {

inline constexpr std::string_view kBuiltinCorpusName = "political-compass-econ";

struct Statement {
  std::string id;
  std::string text;
  Direction bias = Direction::Left;
};

// One supporting/counter argument pair for a statement. The raw_* fields hold
// the generator's full reply; the prompt fields hold the extracted argument.
struct ArgumentSet {
  std::string statement_id;
  int variant_index = 0;
  std::string supporting_prompt;
  std::string counter_prompt;
  std::string raw_supporting;
  std::string raw_counter;
};

enum class ArgumentKind { Original, Supporting, Counter };
enum class Persona { None, LeftPersona, RightPersona };

struct Condition {
  ArgumentKind kind = ArgumentKind::Original;
  int variant_index = 0;  // ignored for Original
  Persona persona = Persona::None;

  bool operator==(const Condition&) const = default;
};

std::string_view to_string(ArgumentKind kind);
std::string_view to_string(Persona persona);
std::optional<ArgumentKind> parse_argument_kind(std::string_view s);
std::optional<Persona> parse_persona(std::string_view s);

// The 3 argument kinds x 3 persona settings for one argument variant.
std::vector<Condition> persona_grid(int variant_index);

// The 19 economic-axis statements, in table order.
const std::vector<Statement>& builtin_corpus();

// `source` is either kBuiltinCorpusName or a path to a CSV with header
// `id,bias,text`. Throws ParseError on malformed rows and ValidationError on
// duplicate ids or empty text.
std::vector<Statement> load_corpus(std::string_view source);
std::vector<Statement> parse_corpus_csv(std::string_view csv_text);

const Statement& find_statement(const std::vector<Statement>& corpus, std::string_view id);

// Prompt text for one elicitation cell. For Supporting/Counter the argument
// text replaces the statement in the template; `arguments` must be given for
// those kinds and must belong to `statement`.
std::string render_prompt(const Statement& statement, const Condition& condition,
                          const ArgumentSet* arguments = nullptr);

std::string build_argument_generation_prompt(const Statement& statement, ArgumentKind kind);

// First non-empty paragraph of a generator reply, trimmed.
std::string extract_argument(std::string_view raw_reply);

struct ArgumentGenerationOptions {
  int n_sets = 3;
  int max_empty_retries = 3;
  double temperature = 1.0;
  int max_tokens = 256;
  uint64_t seed = 0;
};

// Thrown when some but not all variants were produced.
class PartialArgumentsError : public Error {
 public:
  PartialArgumentsError(const std::string& what, std::vector<ArgumentSet> completed)
      : Error(what), completed_(std::move(completed)) {}
  const std::vector<ArgumentSet>& completed() const { return completed_; }

 private:
  std::vector<ArgumentSet> completed_;
};

// Thrown when the generator keeps returning empty (or degenerate) text.
class EmptyGenerationError : public Error {
 public:
  using Error::Error;
};

std::vector<ArgumentSet> generate_argument_sets(const Statement& statement,
                                                llm::Gateway& generator,
                                                const ArgumentGenerationOptions& options = {});

nlohmann::json to_json(const ArgumentSet& set);
ArgumentSet argument_set_from_json(const nlohmann::json& j);
nlohmann::json to_json(const Statement& s);

}  // namespace corpus
}  // namespace press

#endif  // PRESS_CORPUS_HPP_
