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

#include "press/runner.hpp"

#include <algorithm>
#include <atomic>
#include <cstdlib>
#include <map>
#include <memory>
#include <mutex>
#include <set>

#include <fmt/format.h>
#include <fmt/ranges.h>

#include "press/corpus.hpp"
#include "press/factor_analysis.hpp"
#include "press/gateway.hpp"
#include "press/http_backend.hpp"
#include "press/nli.hpp"
#include "press/reversal.hpp"
#include "press/scripted_backend.hpp"
#include "press/stance_judge.hpp"
#include "press/typology.hpp"
#include "press/uncertainty.hpp"
#include "press/util.hpp"

namespace press::runner {

namespace fs = std::filesystem;
using json = nlohmann::json;

RunLedger RunLedger::load(const fs::path& path) {
  RunLedger ledger;
  if (!fs::exists(path)) return ledger;
  const auto j = json::parse(read_file(path), nullptr, false);
  if (j.is_discarded() || !j.contains("stages")) return ledger;
  for (const auto& [name, m] : j["stages"].items()) {
    ledger.stages[name] = {m.value("done", false), m.value("input_hash", ""), m.value("records", int64_t{0})};
  }
  return ledger;
}

void RunLedger::save(const fs::path& path) const {
  json stages = json::object();
  for (const auto& [name, m] : this->stages) {
    stages[name] = {{"done", m.done}, {"input_hash", m.input_hash}, {"records", m.records}};
  }
  write_file_atomic(path, json{{"stages", stages}}.dump(2) + "\n");
}

bool RunLedger::is_current(Stage s, const std::string& input_hash) const {
  const auto it = stages.find(std::string(to_string(s)));
  return it != stages.end() && it->second.done && it->second.input_hash == input_hash;
}

namespace {

constexpr const char* kArguments = "arguments.jsonl";
constexpr const char* kElicitations = "elicitations.jsonl";
constexpr const char* kJudged = "judged.jsonl";
constexpr const char* kLabels = "labels.jsonl";
constexpr const char* kStability = "stability.jsonl";
constexpr const char* kSamples = "samples.jsonl";
constexpr const char* kUncertainty = "uncertainty.jsonl";
constexpr const char* kAuroc = "auroc.jsonl";
constexpr const char* kOutcomes = "outcomes.jsonl";
constexpr const char* kTransitions = "transitions.jsonl";
constexpr const char* kFaResponses = "fa_responses.jsonl";
constexpr const char* kFa = "fa.json";
constexpr const char* kRequests = "requests.jsonl";
constexpr const char* kLedger = "ledger.json";
constexpr const char* kGaps = "gaps.json";

const std::vector<std::string>& report_names() {
  static const std::vector<std::string> names = {
      "class_distribution.csv", "class_counts.csv",       "stability_scores.csv",
      "label_heatmap.csv",      "uncertainty_scores.csv", "auroc.csv",
      "outcomes.csv",           "outcome_proportions.csv", "checkpoint_reversal.csv",
      "transitions.csv",        "fa_eigenvalues.csv",     "fa_rotated_variance.csv",
      "fa_loadings.csv",        "NOTES.txt",
  };
  return names;
}

// Counts calls that reach the underlying classifier (cache misses).
class CountingNli : public judge::NliClassifier {
 public:
  CountingNli(std::shared_ptr<judge::NliClassifier> inner, std::string id)
      : inner_(std::move(inner)), id_(std::move(id)) {}
  std::string id() const override { return id_; }
  judge::NliVerdict classify(const std::string& premise, const std::string& hypothesis) override {
    ++calls_;
    return inner_->classify(premise, hypothesis);
  }
  uint64_t calls() const { return calls_.load(); }

 private:
  std::shared_ptr<judge::NliClassifier> inner_;
  std::string id_;
  std::atomic<uint64_t> calls_{0};
};

class GapList {
 public:
  void add(std::string gap) {
    std::lock_guard lock(mu_);
    items_.push_back(std::move(gap));
  }
  std::vector<std::string> take() {
    std::lock_guard lock(mu_);
    return std::exchange(items_, {});
  }

 private:
  std::mutex mu_;
  std::vector<std::string> items_;
};

struct Context {
  const RunConfig& config;
  const RunOptions& options;
  std::vector<corpus::Statement> statements;
  fs::path out;
  std::shared_ptr<llm::RequestLog> log;
  std::shared_ptr<const llm::RequestLog> replay;
  std::map<std::string, std::unique_ptr<llm::Gateway>> gateways;
  std::unique_ptr<llm::Gateway> generator;
  std::shared_ptr<CountingNli> nli_counter;
  std::shared_ptr<judge::NliClassifier> nli;
  GapList gaps;

  fs::path file(const std::string& name) const { return out / name; }

  llm::Gateway& gateway(const std::string& model) { return *gateways.at(model); }
  judge::NliClassifier& classifier() {
    if (!nli) throw ValidationError("no NLI backend configured");
    return *nli;
  }
  size_t nli_parallelism() const {
    return static_cast<size_t>(std::min(config.parallelism, config.nli ? config.nli->parallelism : 1));
  }
  size_t model_parallelism(const ModelConfig& m) const {
    return static_cast<size_t>(std::min(config.parallelism, m.backend.parallelism));
  }
};

std::shared_ptr<llm::Backend> make_backend(const std::string& name, const BackendDescriptor& d,
                                           const std::vector<corpus::Statement>& statements) {
  if (d.kind == "scripted") {
    return std::make_shared<llm::ScriptedBackend>(llm::scripted_spec_from_json(name, d.agent, statements));
  }
  llm::HttpBackendOptions o;
  o.base_url = d.base_url;
  o.model = d.model;
  if (const char* key = std::getenv(d.api_key_env.c_str())) o.api_key = key;
  o.timeout = std::chrono::seconds(d.timeout_seconds);
  o.capabilities_override = d.capabilities;
  return std::make_shared<llm::HttpChatBackend>(std::move(o));
}

std::shared_ptr<judge::NliClassifier> make_nli(const NliConfig& c) {
  if (c.kind == "keyword") return std::make_shared<judge::KeywordNli>();
  if (c.kind == "scripted") {
    auto nli = std::make_shared<judge::ScriptedNli>();
    for (const auto& cls : c.script.value("classes", json::array())) {
      nli->add_meaning_class(cls.get<std::vector<std::string>>());
    }
    return nli;
  }
  return std::make_shared<judge::HttpNli>(c.url);
}

std::unique_ptr<llm::Gateway> make_gateway(const Context& ctx, std::shared_ptr<llm::Backend> live) {
  std::shared_ptr<llm::Backend> backend = std::move(live);
  if (ctx.replay) backend = std::make_shared<llm::ReplayBackend>(backend->id(), ctx.replay);
  llm::RetryPolicy retry;
  retry.max_retries = ctx.config.max_retries;
  retry.base_delay = std::chrono::milliseconds(ctx.config.backoff_base_ms);
  return std::make_unique<llm::Gateway>(std::move(backend), ctx.log, retry);
}

std::string request_model(const ModelConfig& m) { return m.backend.model.empty() ? m.name : m.backend.model; }

std::vector<corpus::Persona> personas(const RunConfig& c) {
  if (!c.persona_grid) return {corpus::Persona::None};
  return {corpus::Persona::None, corpus::Persona::LeftPersona, corpus::Persona::RightPersona};
}

json direction_json(std::optional<Direction> d) { return d ? json(sign(*d)) : json(nullptr); }

std::optional<Direction> direction_of(const json& j) {
  if (j.is_null()) return std::nullopt;
  return direction_from_sign(j.get<int>());
}

std::optional<typology::Label> label_of(const json& j) {
  if (j.is_null()) return std::nullopt;
  return typology::parse_label(j.get<std::string>());
}

json statements_json(const std::vector<corpus::Statement>& statements) {
  json a = json::array();
  for (const auto& s : statements) a.push_back(corpus::to_json(s));
  return a;
}

json models_json(const RunConfig& c) {
  json a = to_json(c)["models"];
  return a;
}

json nli_json(const RunConfig& c) { return to_json(c)["nli"]; }

const ModelConfig* find_model(const RunConfig& c, const std::string& name) {
  for (const auto& m : c.models) {
    if (m.name == name) return &m;
  }
  return nullptr;
}

std::string pct(double v) { return fmt::format("{:.1f}", v); }

std::string fmt_opt(const json& v, const char* spec = "{:.6f}") {
  if (v.is_null()) return "";
  return fmt::format(fmt::runtime(spec), v.get<double>());
}

void write_csv(const fs::path& path, const csv::Row& header, const std::vector<csv::Row>& rows) {
  std::vector<csv::Row> all;
  all.reserve(rows.size() + 1);
  all.push_back(header);
  all.insert(all.end(), rows.begin(), rows.end());
  write_file_atomic(path, csv::format(all));
}

// Key for label lookups: model/topic/persona.
using CellKey = std::tuple<std::string, std::string, std::string>;

struct LabelIndex {
  // Variant-ordered labels per cell; cells in file order.
  std::map<CellKey, std::vector<std::pair<int, std::optional<typology::Label>>>> cells;

  static LabelIndex from(const std::vector<json>& records) {
    LabelIndex idx;
    for (const auto& r : records) {
      idx.cells[{r.at("model").get<std::string>(), r.at("topic").get<std::string>(),
                 r.at("persona").get<std::string>()}]
          .emplace_back(r.at("variant").get<int>(), label_of(r.at("label")));
    }
    for (auto& [_, v] : idx.cells) std::sort(v.begin(), v.end());
    return idx;
  }

  const std::vector<std::pair<int, std::optional<typology::Label>>>* find(const std::string& model,
                                                                        const std::string& topic,
                                                                        const std::string& persona) const {
    const auto it = cells.find({model, topic, persona});
    return it == cells.end() ? nullptr : &it->second;
  }

  std::vector<std::optional<typology::Label>> labels(const std::string& model, const std::string& topic,
                                                     const std::string& persona) const {
    std::vector<std::optional<typology::Label>> out;
    if (const auto* v = find(model, topic, persona)) {
      for (const auto& [_, l] : *v) out.push_back(l);
    }
    return out;
  }

  // The unpressured-cell label used for class tables, AUROC and transitions.
  std::optional<std::optional<typology::Label>> primary(const std::string& model, const std::string& topic) const {
    const auto* v = find(model, topic, "none");
    if (!v) return std::nullopt;
    for (const auto& [variant, l] : *v) {
      if (variant == 0) return l;
    }
    return std::nullopt;
  }
};

// ---- stages ---------------------------------------------------------------

int64_t stage_arguments(Context& ctx) {
  const auto& cfg = ctx.config;
  const size_t n = ctx.statements.size();
  std::vector<std::vector<corpus::ArgumentSet>> per(n);

  if (cfg.arguments_file) {
    std::map<std::string, std::map<int, corpus::ArgumentSet>> loaded;
    for (const auto& r : jsonl::read(*cfg.arguments_file)) {
      auto set = corpus::argument_set_from_json(r);
      loaded[set.statement_id][set.variant_index] = std::move(set);
    }
    for (size_t i = 0; i < n; ++i) {
      const auto& id = ctx.statements[i].id;
      for (int v = 0; v < cfg.variants; ++v) {
        const auto it = loaded[id].find(v);
        if (it == loaded[id].end()) {
          ctx.gaps.add(fmt::format("arguments: topic {} has no argument set for variant {}", id, v));
        } else {
          per[i].push_back(it->second);
        }
      }
    }
  } else {
    corpus::ArgumentGenerationOptions opts;
    opts.n_sets = cfg.variants;
    opts.max_empty_retries = cfg.argument_retries;
    opts.max_tokens = cfg.max_tokens;
    opts.seed = cfg.seed;
    const size_t par = static_cast<size_t>(std::min(cfg.parallelism, cfg.argument_generator->parallelism));
    parallel_for(n, par, [&](size_t i) {
      const auto& st = ctx.statements[i];
      try {
        per[i] = corpus::generate_argument_sets(st, *ctx.generator, opts);
      } catch (const corpus::PartialArgumentsError& e) {
        per[i] = e.completed();
        ctx.gaps.add(fmt::format("arguments: topic {}: {}", st.id, e.what()));
      } catch (const std::exception& e) {
        ctx.gaps.add(fmt::format("arguments: topic {}: {}", st.id, e.what()));
      }
    });
  }

  std::vector<json> records;
  for (auto& sets : per) {
    std::sort(sets.begin(), sets.end(),
              [](const auto& a, const auto& b) { return a.variant_index < b.variant_index; });
    for (const auto& s : sets) records.push_back(corpus::to_json(s));
  }
  jsonl::write(ctx.file(kArguments), records);
  return static_cast<int64_t>(records.size());
}

int64_t stage_elicitation(Context& ctx) {
  const auto& cfg = ctx.config;
  std::map<std::pair<std::string, int>, corpus::ArgumentSet> args;
  for (const auto& r : jsonl::read(ctx.file(kArguments))) {
    auto s = corpus::argument_set_from_json(r);
    args[{s.statement_id, s.variant_index}] = std::move(s);
  }
  for (const auto& st : ctx.statements) {
    for (int v = 0; v < cfg.variants; ++v) {
      if (!args.count({st.id, v})) {
        ctx.gaps.add(fmt::format("elicitation: topic {} variant {} has no arguments", st.id, v));
      }
    }
  }

  std::vector<json> records;
  for (const auto& m : cfg.models) {
    auto& gw = ctx.gateway(m.name);
    std::vector<std::vector<json>> per(ctx.statements.size());
    parallel_for(ctx.statements.size(), ctx.model_parallelism(m), [&](size_t i) {
      const auto& st = ctx.statements[i];
      std::vector<json> cell_records;
      try {
        for (auto persona : personas(cfg)) {
          std::vector<std::pair<corpus::Condition, const corpus::ArgumentSet*>> cells;
          cells.push_back({{corpus::ArgumentKind::Original, 0, persona}, nullptr});
          for (int v = 0; v < cfg.variants; ++v) {
            const auto it = args.find({st.id, v});
            if (it == args.end()) continue;
            cells.push_back({{corpus::ArgumentKind::Supporting, v, persona}, &it->second});
            cells.push_back({{corpus::ArgumentKind::Counter, v, persona}, &it->second});
          }
          for (const auto& [cond, set] : cells) {
            llm::CompletionRequest req;
            req.model = request_model(m);
            req.prompt = corpus::render_prompt(st, cond, set);
            req.temperature = cfg.elicitation_temperature;
            req.max_tokens = cfg.max_tokens;
            req.seed = static_cast<int64_t>(cfg.seed);
            const auto completions = gw.complete(req);
            const bool original = cond.kind == corpus::ArgumentKind::Original;
            cell_records.push_back({{"model", m.name},
                                    {"topic", st.id},
                                    {"persona", corpus::to_string(persona)},
                                    {"kind", corpus::to_string(cond.kind)},
                                    {"variant", original ? json(nullptr) : json(cond.variant_index)},
                                    {"prompt", req.prompt},
                                    {"request_hash", llm::request_hash(gw.backend_id(), req)},
                                    {"text", completions.front().text}});
          }
        }
        per[i] = std::move(cell_records);
      } catch (const std::exception& e) {
        ctx.gaps.add(fmt::format("elicitation: model {} topic {}: {}", m.name, st.id, e.what()));
      }
    });
    for (auto& v : per) {
      for (auto& r : v) records.push_back(std::move(r));
    }
  }
  jsonl::write(ctx.file(kElicitations), records);
  return static_cast<int64_t>(records.size());
}

int64_t stage_judging(Context& ctx) {
  auto records = jsonl::read(ctx.file(kElicitations));
  auto& nli = ctx.classifier();
  parallel_for(records.size(), ctx.nli_parallelism(), [&](size_t i) {
    json& r = records[i];
    const auto& st = corpus::find_statement(ctx.statements, r.at("topic").get<std::string>());
    const std::string text = r.at("text").get<std::string>();
    r["judgment"] = nullptr;
    r["direction"] = nullptr;
    if (trim(text).empty()) {
      r["error"] = "empty response";
      return;
    }
    try {
      const auto signal = judge::judge_agreement(text, st.text, nli, ctx.config.abstain_threshold);
      r["judgment"] = judge::to_json(signal);
      r["direction"] = direction_json(judge::direction(signal, st.bias));
    } catch (const std::exception& e) {
      r["error"] = e.what();
      r["unjudged"] = true;
      ctx.gaps.add(fmt::format("judging: model {} topic {} {}: {}", r["model"].get<std::string>(), st.id,
                               r["kind"].get<std::string>(), e.what()));
    }
  });
  jsonl::write(ctx.file(kJudged), records);
  return static_cast<int64_t>(records.size());
}

int64_t stage_typology(Context& ctx) {
  const auto& cfg = ctx.config;
  // model/topic/persona -> kind|variant -> direction
  std::map<CellKey, std::map<std::string, std::optional<Direction>>> cells;
  for (const auto& r : jsonl::read(ctx.file(kJudged))) {
    const std::string kind = r.at("kind").get<std::string>();
    const std::string slot = r.at("variant").is_null() ? kind : fmt::format("{}|{}", kind, r["variant"].get<int>());
    cells[{r.at("model").get<std::string>(), r.at("topic").get<std::string>(), r.at("persona").get<std::string>()}]
         [slot] = direction_of(r.at("direction"));
  }

  std::vector<json> records;
  for (const auto& m : cfg.models) {
    for (const auto& st : ctx.statements) {
      for (auto persona : personas(cfg)) {
        const auto it = cells.find({m.name, st.id, std::string(corpus::to_string(persona))});
        if (it == cells.end()) continue;
        const auto& slots = it->second;
        const auto orig = slots.find("original");
        if (orig == slots.end()) continue;
        for (int v = 0; v < cfg.variants; ++v) {
          const auto sup = slots.find(fmt::format("supporting|{}", v));
          const auto cnt = slots.find(fmt::format("counter|{}", v));
          if (sup == slots.end() && cnt == slots.end()) continue;
          json rec = {{"model", m.name},
                      {"topic", st.id},
                      {"persona", corpus::to_string(persona)},
                      {"variant", v},
                      {"label", nullptr},
                      {"typology", nullptr}};
          if (!orig->second) {
            rec["reason"] = "original stance abstained";
          } else {
            const auto a_s = sup == slots.end() ? std::nullopt : sup->second;
            const auto a_c = cnt == slots.end() ? std::nullopt : cnt->second;
            const auto label = typology::classify(*orig->second, a_s, a_c, st.bias);
            if (label) {
              rec["label"] = std::string(typology::to_string(label->value));
              rec["typology"] = typology::to_json(*label);
            } else {
              rec["reason"] = "post-argument stance abstained";
            }
          }
          records.push_back(std::move(rec));
        }
      }
    }
  }
  jsonl::write(ctx.file(kLabels), records);
  return static_cast<int64_t>(records.size());
}

int64_t stage_stability(Context& ctx) {
  const auto idx = LabelIndex::from(jsonl::read(ctx.file(kLabels)));
  std::vector<json> records;
  for (const auto& m : ctx.config.models) {
    for (const auto& st : ctx.statements) {
      for (auto persona : personas(ctx.config)) {
        const std::string p(corpus::to_string(persona));
        if (!idx.find(m.name, st.id, p)) continue;
        const auto labels = idx.labels(m.name, st.id, p);
        const auto score = typology::stability_score(labels);
        std::array<int, 4> counts{};
        for (const auto& l : labels) {
          if (l) ++counts[typology::label_index(*l)];
        }
        records.push_back({{"model", m.name},
                           {"topic", st.id},
                           {"persona", p},
                           {"s", score.s ? json(*score.s) : json(nullptr)},
                           {"n_variants", score.n_variants},
                           {"n_abstained", score.n_abstained},
                           {"diagnostic", score.diagnostic},
                           {"counts", counts}});
      }
    }
  }
  jsonl::write(ctx.file(kStability), records);
  return static_cast<int64_t>(records.size());
}

int64_t stage_sampling(Context& ctx) {
  const auto& cfg = ctx.config;
  std::vector<json> records;
  for (const auto& m : cfg.models) {
    auto& gw = ctx.gateway(m.name);
    llm::Capabilities caps;
    try {
      caps = gw.capabilities();
    } catch (const std::exception& e) {
      ctx.gaps.add(fmt::format("sampling: model {}: capability probe failed: {}", m.name, e.what()));
      continue;
    }
    std::vector<json> per(ctx.statements.size());
    parallel_for(ctx.statements.size(), ctx.model_parallelism(m), [&](size_t i) {
      const auto& st = ctx.statements[i];
      llm::CompletionRequest req;
      req.model = request_model(m);
      req.prompt = corpus::render_prompt(st, {});
      req.temperature = cfg.sampling_temperature;
      req.n = cfg.samples;
      req.max_tokens = cfg.max_tokens;
      req.want_logprobs = caps.supports_logprobs;
      req.seed = static_cast<int64_t>(cfg.seed);
      try {
        const auto completions = gw.complete(req);
        json cs = json::array();
        for (const auto& c : completions) cs.push_back(llm::to_json(c));
        per[i] = {{"model", m.name},
                  {"topic", st.id},
                  {"prompt", req.prompt},
                  {"request_hash", llm::request_hash(gw.backend_id(), req)},
                  {"logprobs", caps.supports_logprobs},
                  {"completions", cs}};
      } catch (const std::exception& e) {
        ctx.gaps.add(fmt::format("sampling: model {} topic {}: {}", m.name, st.id, e.what()));
      }
    });
    for (auto& r : per) {
      if (!r.is_null()) records.push_back(std::move(r));
    }
  }
  jsonl::write(ctx.file(kSamples), records);
  return static_cast<int64_t>(records.size());
}

uncertainty::SampleSet sample_set(const json& r) {
  uncertainty::SampleSet set;
  set.prompt_id = fmt::format("{}/{}", r.at("model").get<std::string>(), r.at("topic").get<std::string>());
  for (const auto& c : r.at("completions")) set.completions.push_back(llm::completion_from_json(c));
  return set;
}

int64_t stage_uncertainty(Context& ctx) {
  const auto samples = jsonl::read(ctx.file(kSamples));
  auto& nli = ctx.classifier();
  std::vector<json> per(samples.size());
  parallel_for(samples.size(), ctx.nli_parallelism(), [&](size_t i) {
    const auto& r = samples[i];
    const auto& st = corpus::find_statement(ctx.statements, r.at("topic").get<std::string>());
    try {
      const auto set = sample_set(r);
      const auto clustering = uncertainty::cluster_semantic(set, nli, st.text);
      per[i] = {{"model", r["model"]},
                {"topic", st.id},
                {"scores", uncertainty::to_json(uncertainty::score(set, clustering))},
                {"clustering", uncertainty::to_json(clustering)}};
    } catch (const std::exception& e) {
      ctx.gaps.add(fmt::format("uncertainty: model {} topic {}: {}", r["model"].get<std::string>(), st.id, e.what()));
    }
  });
  std::vector<json> records;
  for (auto& r : per) {
    if (!r.is_null()) records.push_back(std::move(r));
  }
  jsonl::write(ctx.file(kUncertainty), records);
  return static_cast<int64_t>(records.size());
}

int64_t stage_auroc(Context& ctx) {
  const auto idx = LabelIndex::from(jsonl::read(ctx.file(kLabels)));
  std::map<std::pair<std::string, std::string>, json> scores;
  for (const auto& r : jsonl::read(ctx.file(kUncertainty))) {
    scores[{r.at("model").get<std::string>(), r.at("topic").get<std::string>()}] = r.at("scores");
  }

  std::vector<std::string> groups;
  for (const auto& m : ctx.config.models) groups.push_back(m.name);
  groups.push_back("ALL");

  std::vector<json> records;
  for (const auto& g : groups) {
    for (const std::string metric : {"se", "dse", "pe"}) {
      std::vector<double> values;
      std::vector<bool> positive;
      int missing = 0;
      for (const auto& m : ctx.config.models) {
        if (g != "ALL" && m.name != g) continue;
        for (const auto& st : ctx.statements) {
          const auto label = idx.primary(m.name, st.id);
          const auto s = scores.find({m.name, st.id});
          if (!label || !*label || s == scores.end()) continue;
          const json& v = s->second.at(metric);
          if (v.is_null()) {
            ++missing;
            continue;
          }
          values.push_back(v.get<double>());
          positive.push_back(!typology::is_stable(**label));
        }
      }
      const int n_pos = static_cast<int>(std::count(positive.begin(), positive.end(), true));
      json rec = {{"model", g},
                  {"metric", metric},
                  {"auroc", nullptr},
                  {"n_pos", n_pos},
                  {"n_neg", static_cast<int>(positive.size()) - n_pos}};
      std::vector<std::string> notes;
      if (missing > 0) notes.push_back(fmt::format("{} instances without logprobs excluded", missing));
      try {
        rec["auroc"] = uncertainty::auroc(values, positive);
      } catch (const uncertainty::UndefinedAurocError& e) {
        notes.push_back(fmt::format("undefined: {}", e.what()));
      }
      rec["note"] = fmt::format("{}", fmt::join(notes, "; "));
      records.push_back(std::move(rec));
    }
  }
  jsonl::write(ctx.file(kAuroc), records);
  return static_cast<int64_t>(records.size());
}

json outcome_record(const std::string& model, const std::string& topic, reversal::FamilyKind family,
                    const reversal::ReversalOutcome& o) {
  json dirs = json::array();
  for (Direction d : o.stable_directions) dirs.push_back(std::string(to_string(d)));
  return {{"model", model},
          {"topic", topic},
          {"family", std::string(reversal::to_string(family))},
          {"outcome", std::string(reversal::to_string(o.value))},
          {"stable_directions", dirs}};
}

int64_t stage_reversal(Context& ctx) {
  const auto& cfg = ctx.config;
  const auto idx = LabelIndex::from(jsonl::read(ctx.file(kLabels)));
  std::vector<json> outcomes;

  auto variant_members = [](size_t n) {
    std::vector<std::string> members;
    for (size_t v = 0; v < n; ++v) members.push_back(std::to_string(v));
    return members;
  };

  for (const auto& m : cfg.models) {
    for (const auto& st : ctx.statements) {
      const auto labels = idx.labels(m.name, st.id, "none");
      if (labels.empty()) continue;
      try {
        reversal::ConditionFamily{reversal::FamilyKind::ArgumentVariation, variant_members(labels.size())}
            .validate(cfg.variants);
      } catch (const std::exception& e) {
        ctx.gaps.add(fmt::format("reversal: model {} topic {}: {}", m.name, st.id, e.what()));
        continue;
      }
      outcomes.push_back(
          outcome_record(m.name, st.id, reversal::FamilyKind::ArgumentVariation, reversal::outcome(labels)));
    }
  }

  if (cfg.persona_grid) {
    std::vector<std::string> cells;
    for (const auto& c : corpus::persona_grid(0)) {
      cells.push_back(fmt::format("{}/{}", corpus::to_string(c.persona), corpus::to_string(c.kind)));
    }
    const reversal::ConditionFamily family{reversal::FamilyKind::PersonaGrid, cells};
    family.validate();
    for (const auto& m : cfg.models) {
      for (const auto& st : ctx.statements) {
        std::vector<std::optional<typology::Label>> pooled;
        bool complete = true;
        for (auto persona : personas(cfg)) {
          const auto labels = idx.labels(m.name, st.id, std::string(corpus::to_string(persona)));
          complete = complete && !labels.empty();
          pooled.insert(pooled.end(), labels.begin(), labels.end());
        }
        if (!complete) continue;
        outcomes.push_back(outcome_record(m.name, st.id, reversal::FamilyKind::PersonaGrid, reversal::outcome(pooled)));
      }
    }
  }

  std::vector<json> transitions;
  for (const auto& pair : cfg.checkpoint_pairs) {
    reversal::ConditionFamily{reversal::FamilyKind::CheckpointPair, {pair.before, pair.after}}.validate();
    reversal::TopicLabels before;
    reversal::TopicLabels after;
    for (const auto& st : ctx.statements) {
      const auto lb = idx.labels(pair.before, st.id, "none");
      const auto la = idx.labels(pair.after, st.id, "none");
      if (lb.empty() || la.empty()) continue;
      std::vector<std::optional<typology::Label>> pooled = lb;
      pooled.insert(pooled.end(), la.begin(), la.end());
      auto rec = outcome_record(pair.name, st.id, reversal::FamilyKind::CheckpointPair, reversal::outcome(pooled));
      rec["before"] = pair.before;
      rec["after"] = pair.after;
      outcomes.push_back(std::move(rec));
      const auto pb = idx.primary(pair.before, st.id);
      const auto pa = idx.primary(pair.after, st.id);
      if (pb && pa) {
        before[st.id] = *pb;
        after[st.id] = *pa;
      }
    }
    const auto t = reversal::transition_matrix(before, after);
    transitions.push_back({{"pair", pair.name},
                           {"before", pair.before},
                           {"after", pair.after},
                           {"order", {"S_L", "U_L", "S_R", "U_R"}},
                           {"counts", t.counts},
                           {"probabilities", t.probabilities},
                           {"n_topics", before.size()},
                           {"n_dropped", t.n_dropped}});
  }

  jsonl::write(ctx.file(kOutcomes), outcomes);
  jsonl::write(ctx.file(kTransitions), transitions);
  return static_cast<int64_t>(outcomes.size() + transitions.size());
}

json matrix_json(const Eigen::MatrixXd& m) {
  json rows = json::array();
  for (Eigen::Index r = 0; r < m.rows(); ++r) {
    json row = json::array();
    for (Eigen::Index c = 0; c < m.cols(); ++c) row.push_back(m(r, c));
    rows.push_back(row);
  }
  return rows;
}

json vector_json(const Eigen::VectorXd& v) { return std::vector<double>(v.data(), v.data() + v.size()); }

Eigen::MatrixXd matrix_of(const json& j) {
  const auto rows = static_cast<Eigen::Index>(j.size());
  const auto cols = rows == 0 ? Eigen::Index{0} : static_cast<Eigen::Index>(j[0].size());
  Eigen::MatrixXd m(rows, cols);
  for (Eigen::Index r = 0; r < rows; ++r) {
    for (Eigen::Index c = 0; c < cols; ++c) m(r, c) = j[r][c].get<double>();
  }
  return m;
}

Eigen::VectorXd vector_of(const json& j) {
  const auto v = j.get<std::vector<double>>();
  return Eigen::Map<const Eigen::VectorXd>(v.data(), static_cast<Eigen::Index>(v.size()));
}

int64_t stage_fa(Context& ctx) {
  const auto samples = jsonl::read(ctx.file(kSamples));
  auto& nli = ctx.classifier();
  // (model, topic) -> per-sample agreement
  std::vector<std::vector<std::optional<double>>> judged(samples.size());
  parallel_for(samples.size(), ctx.nli_parallelism(), [&](size_t i) {
    const auto& r = samples[i];
    const auto& st = corpus::find_statement(ctx.statements, r.at("topic").get<std::string>());
    std::vector<std::optional<double>> values;
    try {
      for (const auto& c : r.at("completions")) {
        const std::string text = c.at("text").get<std::string>();
        if (trim(text).empty()) {
          values.emplace_back();
          continue;
        }
        const auto g = judge::judge_agreement(text, st.text, nli, ctx.config.abstain_threshold).g;
        if (g == judge::Agreement::Abstain) values.emplace_back();
        else values.emplace_back(static_cast<double>(static_cast<int>(g)));
      }
      judged[i] = std::move(values);
    } catch (const std::exception& e) {
      ctx.gaps.add(fmt::format("fa: model {} topic {}: {}", r["model"].get<std::string>(), st.id, e.what()));
    }
  });

  std::map<std::pair<std::string, std::string>, const std::vector<std::optional<double>>*> by_cell;
  for (size_t i = 0; i < samples.size(); ++i) {
    if (!judged[i].empty()) {
      by_cell[{samples[i]["model"].get<std::string>(), samples[i]["topic"].get<std::string>()}] = &judged[i];
    }
  }

  std::vector<std::string> items;
  for (const auto& st : ctx.statements) items.push_back(st.id);
  std::vector<std::vector<std::optional<double>>> rows;
  std::vector<json> response_records;
  for (const auto& m : ctx.config.models) {
    for (int s = 0; s < ctx.config.samples; ++s) {
      std::vector<std::optional<double>> row;
      json values = json::array();
      for (const auto& st : ctx.statements) {
        const auto it = by_cell.find({m.name, st.id});
        std::optional<double> v;
        if (it != by_cell.end() && static_cast<size_t>(s) < it->second->size()) v = (*it->second)[s];
        row.push_back(v);
        values.push_back(v ? json(static_cast<int>(*v)) : json(nullptr));
      }
      rows.push_back(std::move(row));
      response_records.push_back({{"model", m.name}, {"sample", s}, {"values", values}});
    }
  }
  jsonl::write(ctx.file(kFaResponses), response_records);

  json result = {{"items", items}};
  try {
    const auto matrix = fa::build_response_matrix(items, rows);
    result["n_rows"] = matrix.values.rows();
    result["dropped_rows"] = matrix.dropped_rows;
    const auto sol = fa::solve(matrix);
    result["eigenvalues"] = vector_json(sol.eigenvalues);
    result["unrotated"] = matrix_json(sol.unrotated);
    result["rotated"] = matrix_json(sol.rotated);
    result["rotation"] = matrix_json(sol.rotation);
    result["uniqueness"] = vector_json(sol.uniqueness);
    result["rotated_variance"] = vector_json(sol.rotated_variance);
    result["warnings"] = sol.warnings;
  } catch (const std::exception& e) {
    result["error"] = e.what();
    ctx.gaps.add(fmt::format("fa: {}", e.what()));
  }
  write_file_atomic(ctx.file(kFa), result.dump(2) + "\n");
  return static_cast<int64_t>(response_records.size());
}

// ---- reports ----------------------------------------------------------------

std::string display_label(typology::Label l) {
  switch (l) {
    case typology::Label::SL: return "S^L";
    case typology::Label::UL: return "U^L";
    case typology::Label::SR: return "S^R";
    case typology::Label::UR: return "U^R";
  }
  return "?";
}

void report_labels(Context& ctx, const fs::path& dir) {
  const auto labels = jsonl::read(ctx.file(kLabels));
  const auto idx = LabelIndex::from(labels);

  std::vector<typology::GroupedLabel> grouped;
  for (const auto& m : ctx.config.models) {
    for (const auto& st : ctx.statements) {
      if (const auto l = idx.primary(m.name, st.id)) grouped.push_back({m.ideology, *l});
    }
  }
  std::vector<std::string> warnings;
  const auto dists = typology::class_distribution(grouped, ctx.config.ci, &warnings);
  const typology::ClassDistribution* by_group[2] = {nullptr, nullptr};
  for (const auto& d : dists) by_group[d.group == typology::Group::LeftLeaning ? 0 : 1] = &d;

  std::vector<csv::Row> table;
  std::vector<csv::Row> counts;
  for (size_t k = 0; k < typology::kAllLabels.size(); ++k) {
    csv::Row row = {display_label(typology::kAllLabels[k])};
    for (const auto* d : by_group) {
      row.push_back(d ? fmt::format("{} ± {}", pct(d->shares[k].percent), pct(d->shares[k].ci_half_width)) : "n/a");
    }
    table.push_back(row);
  }
  for (const auto* d : by_group) {
    if (!d) continue;
    for (size_t k = 0; k < typology::kAllLabels.size(); ++k) {
      counts.push_back({std::string(typology::to_string(d->group)), display_label(typology::kAllLabels[k]),
                        std::to_string(d->shares[k].count), std::to_string(d->n), std::to_string(d->n_abstained),
                        pct(d->shares[k].percent), pct(d->shares[k].ci_half_width)});
    }
  }
  write_csv(dir / "class_distribution.csv", {"Class", "Left-leaning", "Right-leaning"}, table);
  write_csv(dir / "class_counts.csv", {"Group", "Class", "Count", "N", "Abstained", "Percent", "CI"}, counts);

  // Topic x model grid, left-leaning models first.
  std::vector<const ModelConfig*> ordered;
  for (auto g : {typology::Group::LeftLeaning, typology::Group::RightLeaning}) {
    for (const auto& m : ctx.config.models) {
      if (m.ideology == g) ordered.push_back(&m);
    }
  }
  csv::Row header = {"Topic", "Bias"};
  for (const auto* m : ordered) header.push_back(m->name);
  std::vector<csv::Row> grid;
  for (const auto& st : ctx.statements) {
    csv::Row row = {st.id, std::string(to_string(st.bias))};
    for (const auto* m : ordered) {
      const auto l = idx.primary(m->name, st.id);
      row.push_back(!l ? "" : (*l ? display_label(**l) : "abstain"));
    }
    grid.push_back(row);
  }
  write_csv(dir / "label_heatmap.csv", header, grid);
}

void report_stability(Context& ctx, const fs::path& dir) {
  std::vector<csv::Row> rows;
  for (const auto& r : jsonl::read(ctx.file(kStability))) {
    const auto counts = r.at("counts").get<std::vector<int>>();
    rows.push_back({r["model"].get<std::string>(), r["topic"].get<std::string>(), r["persona"].get<std::string>(),
                    fmt_opt(r["s"], "{:.4f}"), std::to_string(r["n_variants"].get<int>()),
                    std::to_string(r["n_abstained"].get<int>()), std::to_string(counts[0]),
                    std::to_string(counts[1]), std::to_string(counts[2]), std::to_string(counts[3])});
  }
  write_csv(dir / "stability_scores.csv",
            {"Model", "Topic", "Persona", "S", "Variants", "Abstained", "S^L", "U^L", "S^R", "U^R"}, rows);
}

void report_uncertainty(Context& ctx, const fs::path& dir) {
  std::optional<LabelIndex> idx;
  if (fs::exists(ctx.file(kLabels))) idx = LabelIndex::from(jsonl::read(ctx.file(kLabels)));
  std::vector<csv::Row> rows;
  for (const auto& r : jsonl::read(ctx.file(kUncertainty))) {
    const auto& s = r.at("scores");
    std::string label;
    if (idx) {
      const auto l = idx->primary(r["model"].get<std::string>(), r["topic"].get<std::string>());
      if (l) label = *l ? display_label(**l) : "abstain";
    }
    rows.push_back({r["model"].get<std::string>(), r["topic"].get<std::string>(), label, fmt_opt(s["pe"]),
                    fmt_opt(s["se"]), fmt_opt(s["dse"]), std::to_string(s["n_clusters"].get<int>()),
                    std::to_string(s["n_samples"].get<int>()), s["degraded"].get<bool>() ? "yes" : "no"});
  }
  write_csv(dir / "uncertainty_scores.csv",
            {"Model", "Topic", "Label", "PE", "SE", "DSE", "Clusters", "Samples", "Degraded"}, rows);
}

void report_auroc(Context& ctx, const fs::path& dir) {
  std::vector<csv::Row> rows;
  for (const auto& r : jsonl::read(ctx.file(kAuroc))) {
    std::string metric = to_lower(r["metric"].get<std::string>());
    std::transform(metric.begin(), metric.end(), metric.begin(), [](unsigned char c) { return std::toupper(c); });
    rows.push_back({r["model"].get<std::string>(), metric, fmt_opt(r["auroc"], "{:.4f}"),
                    std::to_string(r["n_pos"].get<int>()), std::to_string(r["n_neg"].get<int>()),
                    r["note"].get<std::string>()});
  }
  write_csv(dir / "auroc.csv", {"Model", "Metric", "AUROC", "Unstable", "Stable", "Note"}, rows);
}

void report_reversal(Context& ctx, const fs::path& dir) {
  const auto outcomes = jsonl::read(ctx.file(kOutcomes));
  std::vector<csv::Row> rows;
  // (family, model) in first-seen order
  std::vector<std::pair<std::string, std::string>> keys;
  std::map<std::pair<std::string, std::string>, std::vector<std::optional<reversal::Outcome>>> grouped;
  for (const auto& r : outcomes) {
    std::string dirs;
    for (const auto& d : r["stable_directions"]) dirs += (dirs.empty() ? "" : "+") + d.get<std::string>();
    rows.push_back({r["model"].get<std::string>(), r["topic"].get<std::string>(), r["family"].get<std::string>(),
                    r["outcome"].get<std::string>(), dirs});
    const std::pair key{r["family"].get<std::string>(), r["model"].get<std::string>()};
    if (!grouped.count(key)) keys.push_back(key);
    const std::string o = r["outcome"].get<std::string>();
    grouped[key].push_back(o == "SF" ? reversal::Outcome::SF
                                     : (o == "SU" ? reversal::Outcome::SU : reversal::Outcome::ID));
  }
  write_csv(dir / "outcomes.csv", {"Model", "Topic", "Family", "Outcome", "StableDirections"}, rows);

  std::vector<csv::Row> props;
  std::vector<csv::Row> checkpoints;
  for (const auto& key : keys) {
    const auto p = reversal::outcome_proportions(grouped[key]);
    std::string ideology;
    if (const auto* m = find_model(ctx.config, key.second)) ideology = std::string(typology::to_string(m->ideology));
    props.push_back({key.second, ideology, key.first, pct(p.p_sf), pct(p.p_su), pct(p.p_id), std::to_string(p.n_topics)});
    if (key.first == reversal::to_string(reversal::FamilyKind::CheckpointPair)) {
      checkpoints.push_back({key.second, pct(p.p_sf), pct(p.p_su), pct(p.p_id)});
    }
  }
  write_csv(dir / "outcome_proportions.csv", {"Model", "Ideology", "Family", "SF", "SU", "ID", "Topics"}, props);
  write_csv(dir / "checkpoint_reversal.csv", {"Model", "P_SF", "P_SU", "P_ID"}, checkpoints);

  std::vector<csv::Row> trans;
  const std::set<std::pair<size_t, size_t>> highlighted = {{3, 2}, {1, 2}, {0, 2}};
  for (const auto& r : jsonl::read(ctx.file(kTransitions))) {
    for (size_t i = 0; i < 4; ++i) {
      for (size_t j = 0; j < 4; ++j) {
        trans.push_back({r["pair"].get<std::string>(), display_label(typology::kAllLabels[i]),
                         display_label(typology::kAllLabels[j]), std::to_string(r["counts"][i][j].get<int>()),
                         fmt::format("{:.4f}", r["probabilities"][i][j].get<double>()),
                         highlighted.count({i, j}) ? "yes" : "no"});
      }
    }
  }
  write_csv(dir / "transitions.csv", {"Pair", "From", "To", "Count", "Probability", "Highlighted"}, trans);
}

void report_fa(Context& ctx, const fs::path& dir) {
  const auto j = json::parse(read_file(ctx.file(kFa)));
  if (j.contains("error")) {
    for (const char* name : {"fa_eigenvalues.csv", "fa_rotated_variance.csv", "fa_loadings.csv"}) {
      fs::remove(dir / name);
    }
    return;
  }
  fa::FactorSolution sol;
  sol.items = j.at("items").get<std::vector<std::string>>();
  sol.eigenvalues = vector_of(j.at("eigenvalues"));
  sol.unrotated = matrix_of(j.at("unrotated"));
  sol.rotated = matrix_of(j.at("rotated"));
  sol.rotation = matrix_of(j.at("rotation"));
  sol.uniqueness = vector_of(j.at("uniqueness"));
  sol.rotated_variance = vector_of(j.at("rotated_variance"));
  sol.dropped_rows = j.value("dropped_rows", 0);
  const auto report = fa::fa_report(sol);
  write_file_atomic(dir / "fa_eigenvalues.csv", report.eigen_csv());
  write_file_atomic(dir / "fa_rotated_variance.csv", report.variance_csv());
  write_file_atomic(dir / "fa_loadings.csv", report.loadings_csv());
}

constexpr const char* kNotes =
    "Labels\n"
    "  S_L / S_R: the original stance leans left / right and persists under both the\n"
    "  supporting and the counter argument.\n"
    "  U_L / U_R: the original stance leans left / right and changes under at least one\n"
    "  argument. Labels are computed from stance persistence and bias alignment; U_R\n"
    "  therefore means a right-leaning original stance, whatever the argument direction.\n"
    "\n"
    "Class tables and AUROC use the unpressured cell (no persona, first argument\n"
    "variant). Abstained instances are excluded from every denominator.\n"
    "\n"
    "Factor analysis\n"
    "  Proportion and cumulative columns are shares of total variance (the item\n"
    "  count). Rotated factors are sorted by explained variance.\n";

int64_t stage_reports(Context& ctx) {
  const fs::path dir = ctx.out / "reports";
  fs::create_directories(dir);
  int64_t written = 0;
  auto have = [&](const char* f) { return fs::exists(ctx.file(f)); };
  if (have(kLabels)) {
    report_labels(ctx, dir);
    written += 3;
  }
  if (have(kStability)) {
    report_stability(ctx, dir);
    ++written;
  }
  if (have(kUncertainty)) {
    report_uncertainty(ctx, dir);
    ++written;
  }
  if (have(kAuroc)) {
    report_auroc(ctx, dir);
    ++written;
  }
  if (have(kOutcomes) && have(kTransitions)) {
    report_reversal(ctx, dir);
    written += 4;
  }
  if (have(kFa)) {
    report_fa(ctx, dir);
    written += 3;
  }
  write_file_atomic(dir / "NOTES.txt", kNotes);
  return written + 1;
}

// ---- orchestration ------------------------------------------------------------

struct StagePlan {
  std::vector<std::string> required;
  std::vector<std::string> optional;
  std::vector<std::string> outputs;
  json fingerprint;
  int64_t (*body)(Context&);
};

StagePlan plan_for(Stage s, const Context& ctx) {
  const auto& c = ctx.config;
  const json statements = statements_json(ctx.statements);
  switch (s) {
    case Stage::Arguments: {
      json fp = {{"statements", statements}, {"variants", c.variants}};
      if (c.arguments_file) {
        fp["arguments_file"] = sha256_file(*c.arguments_file);
      } else {
        fp["generator"] = to_json(c)["argument_generator"];
        fp["seed"] = c.seed;
        fp["retries"] = c.argument_retries;
        fp["max_tokens"] = c.max_tokens;
      }
      return {{}, {}, {kArguments}, fp, stage_arguments};
    }
    case Stage::Elicitation:
      return {{kArguments},
              {},
              {kElicitations},
              {{"statements", statements},
               {"models", models_json(c)},
               {"temperature", c.elicitation_temperature},
               {"persona_grid", c.persona_grid},
               {"variants", c.variants},
               {"seed", c.seed},
               {"max_tokens", c.max_tokens}},
              stage_elicitation};
    case Stage::Judging:
      return {{kElicitations}, {}, {kJudged},
              {{"statements", statements}, {"nli", nli_json(c)}, {"threshold", c.abstain_threshold}},
              stage_judging};
    case Stage::Typology:
      return {{kJudged}, {}, {kLabels},
              {{"statements", statements}, {"models", models_json(c)}, {"variants", c.variants},
               {"persona_grid", c.persona_grid}},
              stage_typology};
    case Stage::Stability:
      return {{kLabels}, {}, {kStability}, {{"statements", statements}, {"models", models_json(c)}}, stage_stability};
    case Stage::Sampling:
      return {{},
              {},
              {kSamples},
              {{"statements", statements},
               {"models", models_json(c)},
               {"temperature", c.sampling_temperature},
               {"samples", c.samples},
               {"seed", c.seed},
               {"max_tokens", c.max_tokens}},
              stage_sampling};
    case Stage::Uncertainty:
      return {{kSamples}, {}, {kUncertainty}, {{"statements", statements}, {"nli", nli_json(c)}}, stage_uncertainty};
    case Stage::Auroc:
      return {{kLabels, kUncertainty}, {}, {kAuroc}, {{"models", models_json(c)}}, stage_auroc};
    case Stage::Reversal:
      return {{kLabels},
              {},
              {kOutcomes, kTransitions},
              {{"statements", statements},
               {"models", models_json(c)},
               {"pairs", to_json(c)["checkpoint_pairs"]},
               {"persona_grid", c.persona_grid},
               {"variants", c.variants}},
              stage_reversal};
    case Stage::FactorAnalysis:
      return {{kSamples},
              {},
              {kFaResponses, kFa},
              {{"statements", statements}, {"models", models_json(c)}, {"nli", nli_json(c)},
               {"threshold", c.abstain_threshold}, {"samples", c.samples}},
              stage_fa};
    case Stage::Reports:
      return {{},
              {kLabels, kStability, kUncertainty, kAuroc, kOutcomes, kTransitions, kFa},
              {"reports/NOTES.txt"},
              {{"statements", statements}, {"models", models_json(c)}, {"ci", to_json(c)["ci"]},
               {"version", 1}},
              stage_reports};
  }
  throw ContractViolation("unknown stage");
}

std::string input_hash(Stage s, const StagePlan& plan, const Context& ctx) {
  std::string material = fmt::format("{}\n{}\n", to_string(s), plan.fingerprint.dump());
  for (const auto& list : {plan.required, plan.optional}) {
    for (const auto& f : list) {
      const fs::path p = ctx.file(f);
      material += fmt::format("{}={}\n", f, fs::exists(p) ? sha256_file(p) : "missing");
    }
  }
  return sha256_hex(material);
}

bool needs_backends(Stage s) {
  return s == Stage::Arguments || s == Stage::Elicitation || s == Stage::Sampling;
}

bool needs_nli(Stage s) { return s == Stage::Judging || s == Stage::Uncertainty || s == Stage::FactorAnalysis; }

}  // namespace

std::vector<std::string> report_files() {
  std::vector<std::string> out;
  for (const auto& n : report_names()) out.push_back("reports/" + n);
  return out;
}

RunResult run(const RunConfig& config, const RunOptions& options) {
  RunResult result;
  result.output_dir = config.output_dir;
  if (auto violations = validate_config(config); !violations.empty()) {
    result.exit_code = 3;
    result.gaps = std::move(violations);
    return result;
  }

  std::vector<Stage> stages;
  if (options.report_only) {
    stages = {Stage::Typology, Stage::Stability, Stage::Auroc, Stage::Reversal, Stage::Reports};
  } else if (!options.only.empty()) {
    for (Stage s : all_stages()) {
      if (std::find(options.only.begin(), options.only.end(), s) != options.only.end()) stages.push_back(s);
    }
  } else {
    stages = config.stages;
  }

  Context ctx{config, options, corpus::load_corpus(config.corpus), config.output_dir, {}, {}, {}, {}, {}, {}, {}};
  fs::create_directories(ctx.out);
  ctx.log = std::make_shared<llm::RequestLog>(ctx.file(kRequests));
  if (options.replay_log) {
    if (!fs::exists(*options.replay_log)) {
      result.exit_code = 3;
      result.gaps = {fmt::format("replay log {} does not exist", options.replay_log->string())};
      return result;
    }
    if (fs::equivalent(*options.replay_log, ctx.file(kRequests))) {
      ctx.replay = ctx.log;
    } else {
      ctx.replay = std::make_shared<llm::RequestLog>(*options.replay_log);
    }
  }

  const bool want_backends =
      std::any_of(stages.begin(), stages.end(), needs_backends) && !options.report_only;
  const bool want_nli = std::any_of(stages.begin(), stages.end(), needs_nli) && !options.report_only;
  if (want_backends) {
    for (const auto& m : config.models) {
      ctx.gateways[m.name] = make_gateway(ctx, make_backend(m.name, m.backend, ctx.statements));
    }
    if (config.argument_generator && !config.arguments_file) {
      ctx.generator = make_gateway(ctx, make_backend("argument-generator", *config.argument_generator, ctx.statements));
    }
  }
  if (want_nli && config.nli) {
    std::shared_ptr<judge::NliClassifier> inner = make_nli(*config.nli);
    std::string id = inner->id();
    if (config.nli->kind == "scripted") id += ":" + sha256_hex(config.nli->script.dump()).substr(0, 16);
    if (ctx.replay) inner = std::make_shared<judge::ReplayNli>(id, ctx.replay);
    ctx.nli_counter = std::make_shared<CountingNli>(inner, id);
    ctx.nli = std::make_shared<judge::LoggedNli>(ctx.nli_counter, ctx.log);
  }

  const fs::path ledger_path = ctx.file(kLedger);
  RunLedger ledger = RunLedger::load(ledger_path);
  std::vector<std::string> gaps;

  for (Stage s : stages) {
    const std::string name(to_string(s));
    const StagePlan plan = plan_for(s, ctx);
    std::vector<std::string> missing;
    for (const auto& f : plan.required) {
      if (!fs::exists(ctx.file(f))) missing.push_back(f);
    }
    if (!missing.empty()) {
      gaps.push_back(fmt::format("{}: skipped, missing input {}", name, fmt::join(missing, ", ")));
      continue;
    }
    const std::string hash = input_hash(s, plan, ctx);
    const bool outputs_present = std::all_of(plan.outputs.begin(), plan.outputs.end(),
                                             [&](const std::string& f) { return fs::exists(ctx.file(f)); });
    const bool forced = options.report_only && s == Stage::Reports;
    if (!forced && outputs_present && ledger.is_current(s, hash)) {
      result.skipped.push_back(name);
      continue;
    }

    StageMarker marker{false, hash, 0};
    try {
      marker.records = plan.body(ctx);
    } catch (const std::exception& e) {
      ctx.gaps.add(fmt::format("{}: {}", name, e.what()));
    }
    auto stage_gaps = ctx.gaps.take();
    marker.done = stage_gaps.empty();
    gaps.insert(gaps.end(), stage_gaps.begin(), stage_gaps.end());
    ledger.stages[name] = marker;
    ledger.save(ledger_path);
    result.executed.push_back(name);
  }

  uint64_t calls = 0;
  for (const auto& [_, gw] : ctx.gateways) calls += gw->backend_calls();
  if (ctx.generator) calls += ctx.generator->backend_calls();
  if (ctx.nli_counter) calls += ctx.nli_counter->calls();
  (ctx.replay ? result.replayed_calls : result.backend_calls) = calls;

  const fs::path gaps_path = ctx.file(kGaps);
  if (gaps.empty()) {
    fs::remove(gaps_path);
  } else {
    write_file_atomic(gaps_path, json{{"gaps", gaps}}.dump(2) + "\n");
    result.exit_code = 2;
  }
  result.gaps = std::move(gaps);
  return result;
}

}  // namespace press::runner
