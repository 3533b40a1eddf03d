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

// Declarative run configuration and its validation.

#ifndef PRESS_CONFIG_HPP_
#define PRESS_CONFIG_HPP_

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "press/gateway.hpp"
#include "press/typology.hpp"

namespace press::runner {

enum class Stage {
  Arguments,
  Elicitation,
  Judging,
  Typology,
  Stability,
  Sampling,
  Uncertainty,
  Auroc,
  Reversal,
  FactorAnalysis,
  Reports,
};

// Dependency order.
const std::vector<Stage>& all_stages();
std::string_view to_string(Stage s);
std::optional<Stage> parse_stage(std::string_view s);

struct BackendDescriptor {
  std::string kind;  // "http" | "scripted"
  // http
  std::string base_url;
  std::string model;
  std::string api_key_env = "OPENAI_API_KEY";
  std::optional<llm::Capabilities> capabilities;
  int timeout_seconds = 120;
  // scripted: agent document, see scripted_spec_from_json
  nlohmann::json agent = nlohmann::json::object();
  int parallelism = 4;
};

struct ModelConfig {
  std::string name;
  typology::Group ideology = typology::Group::LeftLeaning;
  BackendDescriptor backend;
};

struct NliConfig {
  std::string kind;  // "http" | "keyword" | "scripted"
  std::string url;
  // scripted: {"classes": [[text, ...], ...]}, see ScriptedNli
  nlohmann::json script = nlohmann::json::object();
  int parallelism = 4;
};

struct CheckpointPairConfig {
  std::string name;
  std::string before;
  std::string after;
};

struct RunConfig {
  std::string corpus = "political-compass-econ";
  std::vector<ModelConfig> models;
  std::optional<BackendDescriptor> argument_generator;
  // Pre-generated argument sets (JSONL); replaces the generator.
  std::optional<std::filesystem::path> arguments_file;
  std::optional<NliConfig> nli;
  std::vector<Stage> stages = all_stages();
  double elicitation_temperature = 0.0;
  bool allow_nonzero_elicitation_temperature = false;
  double sampling_temperature = 1.0;
  int samples = 20;
  int variants = 3;
  bool persona_grid = false;
  std::vector<CheckpointPairConfig> checkpoint_pairs;
  std::filesystem::path output_dir = "press-out";
  int parallelism = 4;
  uint64_t seed = 0;
  int max_tokens = 256;
  double abstain_threshold = 0.5;
  typology::CiMethod ci = typology::CiMethod::Normal;
  int max_retries = 5;
  int backoff_base_ms = 500;
  int argument_retries = 3;

  bool has_stage(Stage s) const;
};

// Throws ParseError for documents that do not have the expected shape.
// Relative paths are resolved against `base_dir`.
RunConfig parse_config(const nlohmann::json& j, const std::filesystem::path& base_dir = {});
RunConfig load_config(const std::filesystem::path& path);
nlohmann::json to_json(const RunConfig& c);

// Every violation, in a stable order. Empty means valid.
std::vector<std::string> validate_config(const RunConfig& c);

}  // namespace press::runner

#endif  // PRESS_CONFIG_HPP_
