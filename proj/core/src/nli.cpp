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

#include "press/nli.hpp"

#include <atomic>
#include <cmath>
#include <thread>

#include <fmt/format.h>
#include <httplib.h>

#include "press/gateway.hpp"
#include "press/http_backend.hpp"
#include "press/stance_judge.hpp"
#include "press/util.hpp"

namespace press::judge {

void validate_verdict(const NliVerdict& v) {
  for (double p : {v.entailment, v.neutral, v.contradiction}) {
    if (!(p >= 0.0 && p <= 1.0)) throw ValidationError(fmt::format("NLI probability {} outside [0,1]", p));
  }
  const double sum = v.entailment + v.neutral + v.contradiction;
  if (std::abs(sum - 1.0) > 1e-6) {
    throw ValidationError(fmt::format("NLI probabilities sum to {}, expected 1", sum));
  }
}

nlohmann::json to_json(const NliVerdict& v) {
  return {{"entailment", v.entailment}, {"neutral", v.neutral}, {"contradiction", v.contradiction}};
}

NliVerdict verdict_from_json(const nlohmann::json& j) {
  try {
    return {j.at("entailment").get<double>(), j.at("neutral").get<double>(), j.at("contradiction").get<double>()};
  } catch (const nlohmann::json::exception& e) {
    throw ValidationError(fmt::format("NLI verdict: {}", e.what()));
  }
}

std::string nli_hash(const std::string& classifier_id, const std::string& premise, const std::string& hypothesis) {
  const nlohmann::json key = {{"classifier", classifier_id}, {"premise", premise}, {"hypothesis", hypothesis}};
  return sha256_hex(key.dump());
}

// ---------------------------------------------------------------------------

HttpNli::HttpNli(std::string url, std::chrono::seconds timeout) : url_(std::move(url)), timeout_(timeout) {
  auto [host, path] = llm::split_base_url(url_);
  host_ = std::move(host);
  path_ = path.empty() ? "/" : path;
}

NliVerdict HttpNli::classify(const std::string& premise, const std::string& hypothesis) {
  const nlohmann::json body = {{"premise", premise}, {"hypothesis", hypothesis}};
  constexpr int kMaxAttempts = 5;
  for (int attempt = 1;; ++attempt) {
    httplib::Client cli(host_);
    cli.set_connection_timeout(timeout_);
    cli.set_read_timeout(timeout_);
    auto res = cli.Post(path_, body.dump(), "application/json");
    const int status = res ? res->status : 0;
    if (status == 200) {
      const auto reply = nlohmann::json::parse(res->body, nullptr, false);
      if (reply.is_discarded()) throw llm::TransportError(fmt::format("{}: reply is not JSON", id()), 200, false);
      NliVerdict v = verdict_from_json(reply);
      validate_verdict(v);
      return v;
    }
    const std::string why = res ? fmt::format("HTTP {}", status) : httplib::to_string(res.error());
    if (!llm::is_retryable_status(status) || attempt >= kMaxAttempts) {
      throw llm::TransportError(fmt::format("{}: {}", id(), why), status, llm::is_retryable_status(status));
    }
    std::this_thread::sleep_for(std::chrono::milliseconds(200 * (1 << (attempt - 1))));
  }
}

// ---------------------------------------------------------------------------

namespace {

constexpr NliVerdict kEntails{0.9, 0.07, 0.03};
constexpr NliVerdict kContradicts{0.03, 0.07, 0.9};
constexpr NliVerdict kNeutral{0.1, 0.8, 0.1};

bool strip_prefix(std::string_view s, std::string_view prefix, std::string& rest) {
  if (s.substr(0, prefix.size()) != prefix) return false;
  rest = std::string(s.substr(prefix.size()));
  return true;
}

}  // namespace

NliVerdict KeywordNli::classify(const std::string& premise, const std::string& hypothesis) {
  std::string statement;
  int wanted = 0;
  if (strip_prefix(hypothesis, kAgreeHypothesisPrefix, statement)) wanted = +1;
  else if (strip_prefix(hypothesis, kDisagreeHypothesisPrefix, statement)) wanted = -1;

  if (wanted != 0) {
    const std::string p = normalize_text(premise);
    int polarity = 0;
    if (p.find("disagree") != std::string::npos || p.find("do not agree") != std::string::npos ||
        p.find("don't agree") != std::string::npos) {
      polarity = -1;
    } else if (p.find("agree") != std::string::npos || p == normalize_text(statement)) {
      polarity = +1;
    }
    if (polarity == 0) return kNeutral;
    return polarity == wanted ? kEntails : kContradicts;
  }
  if (normalize_text(premise) == normalize_text(hypothesis)) return {0.95, 0.04, 0.01};
  return {0.05, 0.9, 0.05};
}

// ---------------------------------------------------------------------------

void ScriptedNli::set_pair(const std::string& premise, const std::string& hypothesis, NliVerdict v) {
  pairs_[{premise, hypothesis}] = v;
}

void ScriptedNli::add_meaning_class(std::vector<std::string> members) { classes_.push_back(std::move(members)); }

int ScriptedNli::meaning_of(const std::string& text) const {
  for (size_t c = 0; c < classes_.size(); ++c) {
    for (const auto& m : classes_[c]) {
      if (text.find(m) != std::string::npos) return static_cast<int>(c);
    }
  }
  return -1;
}

NliVerdict ScriptedNli::classify(const std::string& premise, const std::string& hypothesis) {
  ++calls_;
  if (auto it = pairs_.find({premise, hypothesis}); it != pairs_.end()) return it->second;
  const int a = meaning_of(premise);
  const int b = meaning_of(hypothesis);
  if (a >= 0 && b >= 0) return a == b ? kEntails : kContradicts;
  if (has_default_) return default_;
  return keyword_.classify(premise, hypothesis);
}

// ---------------------------------------------------------------------------

LoggedNli::LoggedNli(std::shared_ptr<NliClassifier> inner, std::shared_ptr<llm::RequestLog> log)
    : inner_(std::move(inner)), log_(std::move(log)) {
  if (!inner_ || !log_) throw ContractViolation("LoggedNli needs a classifier and a log");
}

NliVerdict LoggedNli::classify(const std::string& premise, const std::string& hypothesis) {
  const std::string hash = nli_hash(inner_->id(), premise, hypothesis);
  if (auto e = log_->find("nli", hash)) return verdict_from_json(e->at("verdict"));
  const std::string started = utc_timestamp();
  const NliVerdict v = inner_->classify(premise, hypothesis);
  validate_verdict(v);
  log_->append({{"kind", "nli"},
                {"request_hash", hash},
                {"backend", inner_->id()},
                {"request", {{"premise", premise}, {"hypothesis", hypothesis}}},
                {"verdict", to_json(v)},
                {"timestamps", {{"started", started}, {"finished", utc_timestamp()}}}});
  return v;
}

ReplayNli::ReplayNli(std::string classifier_id, std::shared_ptr<const llm::RequestLog> recorded)
    : id_(std::move(classifier_id)), recorded_(std::move(recorded)) {}

NliVerdict ReplayNli::classify(const std::string& premise, const std::string& hypothesis) {
  const std::string hash = nli_hash(id_, premise, hypothesis);
  const auto e = recorded_->find("nli", hash);
  if (!e) throw llm::TransportError(fmt::format("replay miss for NLI {} request {}", id_, hash), 0, false);
  return verdict_from_json(e->at("verdict"));
}

}  // namespace press::judge
