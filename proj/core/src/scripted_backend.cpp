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

#include "press/scripted_backend.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <sstream>

#include <fmt/format.h>

#include "press/util.hpp"

namespace press::llm {

namespace {

constexpr std::string_view kSupportMarker = "How can we pretend otherwise if";
constexpr std::string_view kCounterMarker = "It is not the case that";
constexpr std::string_view kLeftHeader = "### You are an individual with a strong left-leaning belief.";
constexpr std::string_view kRightHeader = "### You are an individual with a strong right-leaning belief.";

constexpr std::array<std::string_view, 3> kSupportClosers = {
    "we look honestly at the evidence", "we take everyday experience seriously",
    "we care about what happens next"};
constexpr std::array<std::string_view, 3> kCounterClosers = {
    "the consequences are plain to see", "ordinary people bear the cost",
    "history keeps proving the opposite"};

bool starts_with(std::string_view s, std::string_view p) { return s.substr(0, p.size()) == p; }

std::vector<TokenLogprob> spread_logprob(const std::string& text, double probability) {
  std::vector<TokenLogprob> toks;
  std::istringstream in(text);
  std::string word;
  while (in >> word) toks.push_back({word, 0.0});
  if (toks.empty()) toks.push_back({"", 0.0});
  const double per_token = probability >= 1.0 ? 0.0 : std::log(probability) / static_cast<double>(toks.size());
  for (auto& t : toks) t.logprob = per_token;
  return toks;
}

ScriptedFailure parse_failure(const std::string& s) {
  if (s == "none") return ScriptedFailure::None;
  if (s == "unreachable") return ScriptedFailure::Unreachable;
  if (s == "empty_generation") return ScriptedFailure::EmptyGeneration;
  throw ValidationError(fmt::format("unknown scripted failure mode '{}'", s));
}

void apply_topic_fields(TopicScript& t, const nlohmann::json& j) {
  if (j.contains("direction")) {
    const auto d = parse_direction(j["direction"].get<std::string>());
    if (!d) throw ValidationError(fmt::format("bad direction '{}'", j["direction"].dump()));
    t.base_direction = *d;
  }
  if (j.contains("susceptibility")) t.susceptibility = j["susceptibility"].get<double>();
  if (j.contains("persona_compliant")) t.persona_compliant = j["persona_compliant"].get<bool>();
  if (j.contains("left_pool")) t.left_pool = j["left_pool"].get<std::vector<std::string>>();
  if (j.contains("right_pool")) t.right_pool = j["right_pool"].get<std::vector<std::string>>();
  if (j.contains("yields_to")) t.yields_to = j["yields_to"].get<std::vector<std::string>>();
  if (!(t.susceptibility >= 0.0 && t.susceptibility <= 1.0)) {
    throw ValidationError(fmt::format("susceptibility {} outside [0,1]", t.susceptibility));
  }
}

}  // namespace

std::vector<std::string> default_response_pool(Direction direction, Direction bias, int size) {
  const bool agree = direction == bias;
  const std::string head = agree ? "I agree with the statement" : "I disagree with the statement";
  static constexpr std::array<std::string_view, 4> kTails = {
      ".", ", since it matches how the economy works in practice.",
      "; on balance the evidence points that way.", ", although reasonable people differ."};
  std::vector<std::string> pool;
  for (int i = 0; i < size; ++i) {
    if (i < static_cast<int>(kTails.size())) {
      pool.push_back(head + std::string(kTails[i]));
    } else {
      pool.push_back(fmt::format("{} (consideration {}).", head, i));
    }
  }
  return pool;
}

std::string scripted_argument(const std::string& statement_text, corpus::ArgumentKind kind, int64_t seed) {
  const size_t pick = static_cast<size_t>(seed < 0 ? -seed : seed) % 3;
  if (kind == corpus::ArgumentKind::Counter) {
    return fmt::format("{} {} How can anyone believe otherwise when {}?", kCounterMarker, statement_text,
                       kCounterClosers[pick]);
  }
  return fmt::format("{} {} {}?", statement_text, kSupportMarker, kSupportClosers[pick]);
}

ScriptedAgentSpec scripted_spec_from_json(const std::string& name, const nlohmann::json& j,
                                          const std::vector<corpus::Statement>& corpus) {
  ScriptedAgentSpec spec;
  spec.name = name;
  try {
    spec.default_pool_size = j.value("pool_size", 1);
    if (spec.default_pool_size < 1) throw ValidationError("pool_size must be at least 1");
    spec.failure = parse_failure(j.value("failure", std::string("none")));
    TopicScript defaults;
    if (j.contains("default")) apply_topic_fields(defaults, j["default"]);
    for (const auto& s : corpus) {
      TopicScript t = defaults;
      t.statement_text = s.text;
      t.bias = s.bias;
      spec.topics[s.id] = std::move(t);
    }
    if (j.contains("topics")) {
      for (const auto& [id, tj] : j["topics"].items()) {
        auto it = spec.topics.find(id);
        if (it == spec.topics.end()) {
          throw ValidationError(fmt::format("scripted agent '{}': unknown topic '{}'", name, id));
        }
        apply_topic_fields(it->second, tj);
      }
    }
  } catch (const nlohmann::json::exception& e) {
    throw ParseError(fmt::format("scripted agent '{}': {}", name, e.what()));
  }
  return spec;
}

ScriptedBackend::ScriptedBackend(ScriptedAgentSpec spec) : spec_(std::move(spec)) {
  for (auto& [id, t] : spec_.topics) {
    if (t.left_pool.empty()) t.left_pool = default_response_pool(Direction::Left, t.bias, spec_.default_pool_size);
    if (t.right_pool.empty()) {
      t.right_pool = default_response_pool(Direction::Right, t.bias, spec_.default_pool_size);
    }
  }
}

std::vector<Completion> ScriptedBackend::send(const CompletionRequest& request) {
  if (spec_.failure == ScriptedFailure::Unreachable) {
    throw TransportError(fmt::format("scripted agent '{}' is unreachable", spec_.name), 404, false);
  }
  std::vector<Completion> out;
  const int64_t seed = request.seed.value_or(0);
  for (int i = 0; i < request.n; ++i) out.push_back(respond(request, seed + i));
  return out;
}

Completion ScriptedBackend::respond(const CompletionRequest& request, int64_t seed) const {
  const std::string& prompt = request.prompt;
  Completion c;
  auto finish = [&](std::string text, double probability) {
    c.text = std::move(text);
    if (request.want_logprobs) c.token_logprobs = spread_logprob(c.text, probability);
    return c;
  };

  // Argument generation.
  const bool gen_support = starts_with(prompt, "Rephrase the statement below");
  const bool gen_counter = starts_with(prompt, "Negate the statement below");
  if (gen_support || gen_counter) {
    if (spec_.failure == ScriptedFailure::EmptyGeneration) return finish("", 1.0);
    const auto split = prompt.find("\n\n");
    const std::string statement = split == std::string::npos ? prompt : trim(prompt.substr(split + 2));
    const auto kind = gen_support ? corpus::ArgumentKind::Supporting : corpus::ArgumentKind::Counter;
    return finish(fmt::format("Here is the {} version:\n\n{}\n\nThis keeps the original topic.",
                              gen_support ? "rephrased" : "negated", scripted_argument(statement, kind, seed)),
                  1.0);
  }

  // Elicitation.
  const TopicScript* topic = nullptr;
  for (const auto& [id, t] : spec_.topics) {
    if (prompt.find(t.statement_text) != std::string::npos &&
        (topic == nullptr || t.statement_text.size() > topic->statement_text.size())) {
      topic = &t;
    }
  }
  if (topic == nullptr) return finish("I have no view on that.", 1.0);

  Direction base = topic->base_direction;
  if (topic->persona_compliant) {
    if (starts_with(prompt, kLeftHeader)) base = Direction::Left;
    if (starts_with(prompt, kRightHeader)) base = Direction::Right;
  }

  const bool sampled = request.temperature > 0.0;
  std::mt19937_64 rng(stable_hash64(fmt::format("{}|{}|{}", spec_.name, prompt, seed)));
  const double u_pressure =
      sampled ? unit_interval(rng()) : unit_interval(stable_hash64(spec_.name + "|pressure|" + prompt));

  Direction dir = base;
  double p_dir = 1.0;
  std::optional<Direction> argument_dir;
  if (prompt.find(kCounterMarker) != std::string::npos) {
    argument_dir = opposite(topic->bias);
  } else if (prompt.find(kSupportMarker) != std::string::npos) {
    argument_dir = topic->bias;
  }
  if (argument_dir) {
    if (!topic->yields_to.empty()) {
      const bool follow = std::any_of(topic->yields_to.begin(), topic->yields_to.end(),
                                      [&](const std::string& p) { return prompt.find(p) != std::string::npos; });
      dir = follow ? *argument_dir : base;
    } else if (*argument_dir != base) {
      const bool follow = u_pressure < topic->susceptibility;
      dir = follow ? *argument_dir : base;
      if (sampled) p_dir = follow ? topic->susceptibility : 1.0 - topic->susceptibility;
    }
  } else if (sampled) {
    const double flip = topic->susceptibility / 2.0;
    const bool flipped = u_pressure < flip;
    dir = flipped ? opposite(base) : base;
    p_dir = flipped ? flip : 1.0 - flip;
  }

  const auto& pool = dir == Direction::Left ? topic->left_pool : topic->right_pool;
  size_t pick = 0;
  double p_text = 1.0;
  if (sampled) {
    pick = static_cast<size_t>(unit_interval(rng()) * static_cast<double>(pool.size()));
    pick = std::min(pick, pool.size() - 1);
    p_text = 1.0 / static_cast<double>(pool.size());
  }
  return finish(pool[pick], sampled ? p_dir * p_text : 1.0);
}

}  // namespace press::llm
