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

#include "press/config.hpp"

#include <set>

#include <fmt/format.h>

#include "press/corpus.hpp"
#include "press/scripted_backend.hpp"
#include "press/util.hpp"

namespace press::runner {

const std::vector<Stage>& all_stages() {
  static const std::vector<Stage> stages = {
      Stage::Arguments, Stage::Elicitation, Stage::Judging,  Stage::Typology,
      Stage::Stability, Stage::Sampling,    Stage::Uncertainty, Stage::Auroc,
      Stage::Reversal,  Stage::FactorAnalysis, Stage::Reports,
  };
  return stages;
}

std::string_view to_string(Stage s) {
  switch (s) {
    case Stage::Arguments: return "arguments";
    case Stage::Elicitation: return "elicitation";
    case Stage::Judging: return "judging";
    case Stage::Typology: return "typology";
    case Stage::Stability: return "stability";
    case Stage::Sampling: return "sampling";
    case Stage::Uncertainty: return "uncertainty";
    case Stage::Auroc: return "auroc";
    case Stage::Reversal: return "reversal";
    case Stage::FactorAnalysis: return "fa";
    case Stage::Reports: return "reports";
  }
  return "?";
}

std::optional<Stage> parse_stage(std::string_view s) {
  for (Stage st : all_stages()) {
    if (to_string(st) == s) return st;
  }
  return std::nullopt;
}

bool RunConfig::has_stage(Stage s) const { return std::find(stages.begin(), stages.end(), s) != stages.end(); }

namespace {

const std::set<std::string> kTopLevelKeys = {
    "corpus",       "models",     "argument_generator", "arguments_file", "nli",
    "stages",       "temperatures", "allow_nonzero_elicitation_temperature", "samples",
    "variants",     "persona_grid", "checkpoint_pairs", "output_dir", "parallelism",
    "seed",         "max_tokens", "abstain_threshold", "ci", "retry", "argument_retries"};

BackendDescriptor parse_backend(const nlohmann::json& j) {
  BackendDescriptor b;
  b.kind = j.at("kind").get<std::string>();
  b.base_url = j.value("base_url", "");
  b.model = j.value("model", "");
  b.api_key_env = j.value("api_key_env", b.api_key_env);
  b.timeout_seconds = j.value("timeout_seconds", b.timeout_seconds);
  b.parallelism = j.value("parallelism", b.parallelism);
  if (j.contains("capabilities")) b.capabilities = llm::capabilities_from_json(j["capabilities"]);
  if (j.contains("agent")) b.agent = j["agent"];
  return b;
}

nlohmann::json backend_json(const BackendDescriptor& b) {
  nlohmann::json j = {{"kind", b.kind}, {"parallelism", b.parallelism}};
  if (b.kind == "http") {
    j["base_url"] = b.base_url;
    j["model"] = b.model;
    j["api_key_env"] = b.api_key_env;
    j["timeout_seconds"] = b.timeout_seconds;
    if (b.capabilities) j["capabilities"] = llm::to_json(*b.capabilities);
  } else {
    j["agent"] = b.agent;
  }
  return j;
}

nlohmann::json nli_json(const NliConfig& n) {
  nlohmann::json j = {{"kind", n.kind}, {"parallelism", n.parallelism}};
  if (n.kind == "http") j["url"] = n.url;
  if (n.kind == "scripted") j["classes"] = n.script.value("classes", nlohmann::json::array());
  return j;
}

std::filesystem::path resolve(const std::filesystem::path& base, const std::string& p) {
  std::filesystem::path path(p);
  return path.is_absolute() || base.empty() ? path : base / path;
}

}  // namespace

RunConfig parse_config(const nlohmann::json& j, const std::filesystem::path& base_dir) {
  if (!j.is_object()) throw ParseError("config must be a JSON object");
  for (const auto& [key, _] : j.items()) {
    if (!kTopLevelKeys.count(key)) throw ParseError(fmt::format("unknown config key '{}'", key));
  }
  RunConfig c;
  try {
    if (j.contains("corpus")) {
      const std::string src = j["corpus"].get<std::string>();
      c.corpus = src == corpus::kBuiltinCorpusName ? src : resolve(base_dir, src).string();
    }
    for (const auto& mj : j.value("models", nlohmann::json::array())) {
      ModelConfig m;
      m.name = mj.at("name").get<std::string>();
      const auto ideology = parse_direction(mj.at("ideology").get<std::string>());
      if (!ideology) throw ParseError(fmt::format("model '{}': ideology must be left or right", m.name));
      m.ideology = *ideology == Direction::Left ? typology::Group::LeftLeaning : typology::Group::RightLeaning;
      m.backend = parse_backend(mj.at("backend"));
      c.models.push_back(std::move(m));
    }
    if (j.contains("argument_generator") && !j["argument_generator"].is_null()) {
      c.argument_generator = parse_backend(j["argument_generator"]);
    }
    if (j.contains("arguments_file") && !j["arguments_file"].is_null()) {
      c.arguments_file = resolve(base_dir, j["arguments_file"].get<std::string>());
    }
    if (j.contains("nli") && !j["nli"].is_null()) {
      NliConfig n;
      n.kind = j["nli"].at("kind").get<std::string>();
      n.url = j["nli"].value("url", "");
      if (j["nli"].contains("classes")) n.script["classes"] = j["nli"]["classes"];
      n.parallelism = j["nli"].value("parallelism", n.parallelism);
      c.nli = n;
    }
    if (j.contains("stages")) {
      c.stages.clear();
      for (const auto& s : j["stages"]) {
        const std::string name = s.get<std::string>();
        if (name == "all") {
          c.stages = all_stages();
          break;
        }
        const auto st = parse_stage(name);
        if (!st) throw ParseError(fmt::format("unknown stage '{}'", name));
        c.stages.push_back(*st);
      }
      std::vector<Stage> ordered;
      for (Stage s : all_stages()) {
        if (c.has_stage(s)) ordered.push_back(s);
      }
      c.stages = std::move(ordered);
    }
    if (j.contains("temperatures")) {
      c.elicitation_temperature = j["temperatures"].value("elicitation", c.elicitation_temperature);
      c.sampling_temperature = j["temperatures"].value("sampling", c.sampling_temperature);
    }
    c.allow_nonzero_elicitation_temperature =
        j.value("allow_nonzero_elicitation_temperature", c.allow_nonzero_elicitation_temperature);
    c.samples = j.value("samples", c.samples);
    c.variants = j.value("variants", c.variants);
    c.persona_grid = j.value("persona_grid", c.persona_grid);
    for (const auto& pj : j.value("checkpoint_pairs", nlohmann::json::array())) {
      c.checkpoint_pairs.push_back(
          {pj.at("name").get<std::string>(), pj.at("before").get<std::string>(), pj.at("after").get<std::string>()});
    }
    if (j.contains("output_dir")) c.output_dir = resolve(base_dir, j["output_dir"].get<std::string>());
    c.parallelism = j.value("parallelism", c.parallelism);
    c.seed = j.value("seed", c.seed);
    c.max_tokens = j.value("max_tokens", c.max_tokens);
    c.abstain_threshold = j.value("abstain_threshold", c.abstain_threshold);
    if (j.contains("ci")) {
      const std::string ci = j["ci"].get<std::string>();
      if (ci == "normal") c.ci = typology::CiMethod::Normal;
      else if (ci == "wilson") c.ci = typology::CiMethod::Wilson;
      else throw ParseError(fmt::format("ci must be 'normal' or 'wilson', got '{}'", ci));
    }
    if (j.contains("retry")) {
      c.max_retries = j["retry"].value("max_retries", c.max_retries);
      c.backoff_base_ms = j["retry"].value("base_ms", c.backoff_base_ms);
    }
    c.argument_retries = j.value("argument_retries", c.argument_retries);
  } catch (const nlohmann::json::exception& e) {
    throw ParseError(fmt::format("config: {}", e.what()));
  }
  return c;
}

RunConfig load_config(const std::filesystem::path& path) {
  const auto j = nlohmann::json::parse(read_file(path), nullptr, false);
  if (j.is_discarded()) throw ParseError(fmt::format("{} is not valid JSON", path.string()));
  return parse_config(j, path.parent_path());
}

nlohmann::json to_json(const RunConfig& c) {
  nlohmann::json models = nlohmann::json::array();
  for (const auto& m : c.models) {
    models.push_back({{"name", m.name},
                      {"ideology", m.ideology == typology::Group::LeftLeaning ? "left" : "right"},
                      {"backend", backend_json(m.backend)}});
  }
  nlohmann::json stages = nlohmann::json::array();
  for (Stage s : c.stages) stages.push_back(std::string(to_string(s)));
  nlohmann::json pairs = nlohmann::json::array();
  for (const auto& p : c.checkpoint_pairs) pairs.push_back({{"name", p.name}, {"before", p.before}, {"after", p.after}});
  nlohmann::json j = {
      {"corpus", c.corpus},
      {"models", models},
      {"argument_generator", c.argument_generator ? backend_json(*c.argument_generator) : nlohmann::json(nullptr)},
      {"arguments_file", c.arguments_file ? nlohmann::json(c.arguments_file->string()) : nlohmann::json(nullptr)},
      {"nli", c.nli ? nli_json(*c.nli) : nlohmann::json(nullptr)},
      {"stages", stages},
      {"temperatures", {{"elicitation", c.elicitation_temperature}, {"sampling", c.sampling_temperature}}},
      {"allow_nonzero_elicitation_temperature", c.allow_nonzero_elicitation_temperature},
      {"samples", c.samples},
      {"variants", c.variants},
      {"persona_grid", c.persona_grid},
      {"checkpoint_pairs", pairs},
      {"output_dir", c.output_dir.string()},
      {"parallelism", c.parallelism},
      {"seed", c.seed},
      {"max_tokens", c.max_tokens},
      {"abstain_threshold", c.abstain_threshold},
      {"ci", c.ci == typology::CiMethod::Normal ? "normal" : "wilson"},
      {"retry", {{"max_retries", c.max_retries}, {"base_ms", c.backoff_base_ms}}},
      {"argument_retries", c.argument_retries},
  };
  return j;
}

std::vector<std::string> validate_config(const RunConfig& c) {
  std::vector<std::string> v;
  std::vector<corpus::Statement> statements;
  try {
    statements = corpus::load_corpus(c.corpus);
  } catch (const std::exception& e) {
    v.push_back(fmt::format("corpus: {}", e.what()));
  }

  auto check_backend = [&](const std::string& who, const BackendDescriptor& b) {
    if (b.kind == "http") {
      if (b.base_url.empty()) v.push_back(fmt::format("{}: http backend needs base_url", who));
      else if (b.base_url.find("://") == std::string::npos) v.push_back(fmt::format("{}: base_url needs a scheme", who));
      if (b.model.empty()) v.push_back(fmt::format("{}: http backend needs model", who));
    } else if (b.kind == "scripted") {
      if (!statements.empty()) {
        try {
          (void)llm::scripted_spec_from_json(who, b.agent, statements);
        } catch (const std::exception& e) {
          v.push_back(fmt::format("{}: {}", who, e.what()));
        }
      }
    } else {
      v.push_back(fmt::format("{}: unknown backend kind '{}'", who, b.kind));
    }
    if (b.parallelism < 1) v.push_back(fmt::format("{}: parallelism must be at least 1", who));
  };

  if (c.models.empty()) v.push_back("models: at least one model is required");
  std::set<std::string> names;
  for (const auto& m : c.models) {
    if (m.name.empty()) v.push_back("models: model name must be non-empty");
    if (!names.insert(m.name).second) v.push_back(fmt::format("models: duplicate model name '{}'", m.name));
    check_backend(fmt::format("model '{}'", m.name), m.backend);
  }

  if (c.has_stage(Stage::Arguments) && !c.argument_generator && !c.arguments_file) {
    v.push_back("arguments: an argument_generator backend or an arguments_file is required");
  }
  if (c.argument_generator) check_backend("argument_generator", *c.argument_generator);
  if (c.arguments_file && !std::filesystem::exists(*c.arguments_file)) {
    v.push_back(fmt::format("arguments_file: {} does not exist", c.arguments_file->string()));
  }

  const bool needs_nli =
      c.has_stage(Stage::Judging) || c.has_stage(Stage::Uncertainty) || c.has_stage(Stage::FactorAnalysis);
  if (needs_nli && !c.nli) {
    v.push_back("nli: an NLI backend is required when judging, uncertainty or fa is enabled");
  }
  if (c.nli) {
    if (c.nli->kind == "http") {
      if (c.nli->url.find("://") == std::string::npos) v.push_back("nli: http backend needs a url with scheme");
    } else if (c.nli->kind == "scripted") {
      const auto classes = c.nli->script.value("classes", nlohmann::json::array());
      bool ok = classes.is_array();
      for (const auto& cls : classes) {
        ok = ok && cls.is_array() && !cls.empty();
        for (const auto& m : cls) ok = ok && m.is_string() && !m.get<std::string>().empty();
      }
      if (!ok) v.push_back("nli: scripted classes must be non-empty lists of non-empty strings");
    } else if (c.nli->kind != "keyword") {
      v.push_back(fmt::format("nli: unknown kind '{}'", c.nli->kind));
    }
    if (c.nli->parallelism < 1) v.push_back("nli: parallelism must be at least 1");
  }

  if (c.elicitation_temperature < 0) v.push_back("temperatures.elicitation must be non-negative");
  if (c.elicitation_temperature != 0.0 && !c.allow_nonzero_elicitation_temperature) {
    v.push_back("temperatures.elicitation must be 0 unless allow_nonzero_elicitation_temperature is set");
  }
  if (c.has_stage(Stage::Uncertainty) && c.samples < 2) {
    v.push_back("samples: N ≥ 2 required for the uncertainty stage");
  }
  if (c.samples < 1) v.push_back("samples must be at least 1");
  if (c.has_stage(Stage::Sampling) && !(c.sampling_temperature > 0.0)) {
    v.push_back("temperatures.sampling must be positive");
  }
  if (c.variants < 1) v.push_back("variants must be at least 1");
  if (c.parallelism < 1) v.push_back("parallelism must be at least 1");
  if (c.max_tokens < 1) v.push_back("max_tokens must be at least 1");
  if (c.max_retries < 0 || c.backoff_base_ms < 0) v.push_back("retry settings must be non-negative");
  if (c.argument_retries < 0) v.push_back("argument_retries must be non-negative");
  if (!(c.abstain_threshold >= 0.0 && c.abstain_threshold <= 1.0)) v.push_back("abstain_threshold must be in [0,1]");
  if (c.output_dir.empty()) v.push_back("output_dir must be set");

  std::set<std::string> pair_names;
  for (const auto& p : c.checkpoint_pairs) {
    if (!pair_names.insert(p.name).second) v.push_back(fmt::format("checkpoint_pairs: duplicate name '{}'", p.name));
    if (!names.count(p.before)) v.push_back(fmt::format("checkpoint pair '{}': unknown model '{}'", p.name, p.before));
    if (!names.count(p.after)) v.push_back(fmt::format("checkpoint pair '{}': unknown model '{}'", p.name, p.after));
    if (p.before == p.after) v.push_back(fmt::format("checkpoint pair '{}': before and after must differ", p.name));
  }
  return v;
}

}  // namespace press::runner
