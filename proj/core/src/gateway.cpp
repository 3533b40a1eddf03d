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

#include "press/gateway.hpp"

#include <cmath>
#include <random>
#include <thread>

#include <fmt/format.h>

#include "press/util.hpp"

namespace press::llm {

void CompletionRequest::validate() const {
  if (!(temperature >= 0.0)) throw ContractViolation("temperature must be non-negative");
  if (n < 1) throw ContractViolation("n must be positive");
  if (max_tokens < 1) throw ContractViolation("max_tokens must be positive");
  if (temperature == 0.0 && n != 1) {
    throw ContractViolation("temperature 0 requests are deterministic and must use n = 1");
  }
}

std::optional<double> Completion::mean_logprob() const {
  if (!token_logprobs || token_logprobs->empty()) return std::nullopt;
  return *total_logprob() / static_cast<double>(token_logprobs->size());
}

std::optional<double> Completion::total_logprob() const {
  if (!token_logprobs || token_logprobs->empty()) return std::nullopt;
  double sum = 0.0;
  for (const auto& t : *token_logprobs) sum += t.logprob;
  return sum;
}

nlohmann::json to_json(const CompletionRequest& r) {
  nlohmann::json j = {{"model", r.model},
                      {"prompt", r.prompt},
                      {"temperature", r.temperature},
                      {"n", r.n},
                      {"max_tokens", r.max_tokens},
                      {"want_logprobs", r.want_logprobs}};
  j["seed"] = r.seed ? nlohmann::json(*r.seed) : nlohmann::json(nullptr);
  return j;
}

CompletionRequest request_from_json(const nlohmann::json& j) {
  CompletionRequest r;
  r.model = j.at("model").get<std::string>();
  r.prompt = j.at("prompt").get<std::string>();
  r.temperature = j.at("temperature").get<double>();
  r.n = j.at("n").get<int>();
  r.max_tokens = j.at("max_tokens").get<int>();
  r.want_logprobs = j.at("want_logprobs").get<bool>();
  if (j.contains("seed") && !j["seed"].is_null()) r.seed = j["seed"].get<int64_t>();
  return r;
}

nlohmann::json to_json(const Completion& c) {
  nlohmann::json j = {{"text", c.text}, {"finish_reason", c.finish_reason}};
  if (c.token_logprobs) {
    nlohmann::json toks = nlohmann::json::array();
    for (const auto& t : *c.token_logprobs) toks.push_back({t.token, t.logprob});
    j["token_logprobs"] = std::move(toks);
  } else {
    j["token_logprobs"] = nullptr;
  }
  return j;
}

Completion completion_from_json(const nlohmann::json& j) {
  Completion c;
  c.text = j.at("text").get<std::string>();
  c.finish_reason = j.value("finish_reason", "stop");
  if (j.contains("token_logprobs") && !j["token_logprobs"].is_null()) {
    std::vector<TokenLogprob> toks;
    for (const auto& t : j["token_logprobs"]) toks.push_back({t.at(0).get<std::string>(), t.at(1).get<double>()});
    c.token_logprobs = std::move(toks);
  }
  return c;
}

nlohmann::json to_json(const Capabilities& c) {
  return {{"supports_logprobs", c.supports_logprobs},
          {"supports_n", c.supports_n},
          {"supports_seed", c.supports_seed}};
}

Capabilities capabilities_from_json(const nlohmann::json& j) {
  return {j.value("supports_logprobs", false), j.value("supports_n", false),
          j.value("supports_seed", false)};
}

std::string request_hash(const std::string& backend_id, const CompletionRequest& request) {
  const nlohmann::json key = {{"backend", backend_id}, {"request", to_json(request)}};
  return sha256_hex(key.dump());
}

namespace {

void check_completion(const Completion& c) {
  if (c.token_logprobs) {
    if (c.token_logprobs->empty()) throw ValidationError("completion carries an empty logprob list");
    for (const auto& t : *c.token_logprobs) {
      if (!(t.logprob <= 0.0)) {
        throw ValidationError(fmt::format("token logprob {} for '{}' is positive", t.logprob, t.token));
      }
    }
  }
}

nlohmann::json attempts_json(const std::vector<AttemptRecord>& attempts) {
  nlohmann::json a = nlohmann::json::array();
  for (const auto& r : attempts) {
    a.push_back({{"attempt", r.attempt}, {"status", r.status}, {"error", r.error}, {"timestamp", r.timestamp}});
  }
  return a;
}

}  // namespace

// ---------------------------------------------------------------------------
// RequestLog

RequestLog::RequestLog(std::filesystem::path path) : path_(std::move(path)) {
  if (std::filesystem::exists(*path_)) {
    for (auto& e : jsonl::read(*path_)) {
      index_[{e.value("kind", ""), e.value("request_hash", "")}] = entries_.size();
      entries_.push_back(std::move(e));
    }
  } else if (path_->has_parent_path()) {
    std::filesystem::create_directories(path_->parent_path());
  }
  out_.open(*path_, std::ios::binary | std::ios::app);
  if (!out_) throw Error(fmt::format("cannot open request log {}", path_->string()));
}

void RequestLog::append(nlohmann::json entry) {
  std::lock_guard lock(mu_);
  if (out_.is_open()) {
    out_ << entry.dump() << '\n';
    out_.flush();
  }
  index_[{entry.value("kind", ""), entry.value("request_hash", "")}] = entries_.size();
  entries_.push_back(std::move(entry));
}

std::optional<nlohmann::json> RequestLog::find(const std::string& kind, const std::string& hash) const {
  std::lock_guard lock(mu_);
  const auto it = index_.find({kind, hash});
  if (it == index_.end()) return std::nullopt;
  return entries_[it->second];
}

std::vector<nlohmann::json> RequestLog::entries() const {
  std::lock_guard lock(mu_);
  return entries_;
}

size_t RequestLog::size() const {
  std::lock_guard lock(mu_);
  return entries_.size();
}

// ---------------------------------------------------------------------------
// Gateway

Gateway::Gateway(std::shared_ptr<Backend> backend, std::shared_ptr<RequestLog> log, RetryPolicy retry)
    : backend_(std::move(backend)), log_(std::move(log)), retry_(std::move(retry)) {
  if (!backend_) throw ContractViolation("gateway needs a backend");
  if (!log_) log_ = std::make_shared<RequestLog>();
  if (!retry_.sleep) retry_.sleep = [](std::chrono::milliseconds d) { std::this_thread::sleep_for(d); };
  backend_id_ = backend_->id();
}

Capabilities Gateway::capabilities() {
  std::lock_guard lock(caps_mu_);
  if (caps_) return *caps_;
  if (auto cached = log_->find("capabilities", backend_id_)) {
    caps_ = capabilities_from_json(cached->at("capabilities"));
    return *caps_;
  }
  std::vector<AttemptRecord> attempts;
  Capabilities probed;
  retrying(backend_id_ + "|capabilities", attempts, [&] { probed = backend_->capabilities(); });
  caps_ = probed;
  log_->append({{"kind", "capabilities"},
                {"request_hash", backend_id_},
                {"backend", backend_id_},
                {"capabilities", to_json(*caps_)},
                {"attempts", attempts_json(attempts)},
                {"timestamps", {{"recorded", utc_timestamp()}}}});
  return *caps_;
}

void Gateway::retrying(const std::string& jitter_key, std::vector<AttemptRecord>& attempts,
                       const std::function<void()>& call) {
  std::mt19937_64 jitter_rng(stable_hash64(jitter_key));
  for (int attempt = 1;; ++attempt) {
    AttemptRecord rec;
    rec.attempt = static_cast<int>(attempts.size()) + 1;
    rec.timestamp = utc_timestamp();
    try {
      ++backend_calls_;
      call();
      attempts.push_back(rec);
      return;
    } catch (const TransportError& e) {
      rec.status = e.status();
      rec.error = e.what();
      attempts.push_back(rec);
      if (!e.retryable()) throw;
      if (attempt > retry_.max_retries) {
        throw RetryExhaustedError(
            fmt::format("{}: giving up after {} attempts: {}", backend_id_, attempt, e.what()), attempts);
      }
      double delay = static_cast<double>(retry_.base_delay.count()) * std::pow(retry_.factor, attempt - 1);
      if (retry_.jitter) delay *= 0.5 + 0.5 * unit_interval(jitter_rng());
      retry_.sleep(std::chrono::milliseconds(static_cast<int64_t>(delay)));
    }
  }
}

std::vector<Completion> Gateway::send_with_retry(const CompletionRequest& request,
                                                 std::vector<AttemptRecord>& attempts) {
  std::vector<Completion> out;
  retrying(request_hash(backend_id_, request), attempts, [&] { out = backend_->send(request); });
  return out;
}

std::vector<Completion> Gateway::complete(const CompletionRequest& request) {
  request.validate();
  const std::string hash = request_hash(backend_id_, request);
  if (auto cached = log_->find("completion", hash)) {
    std::vector<Completion> out;
    for (const auto& c : cached->at("completions")) out.push_back(completion_from_json(c));
    return out;
  }

  const Capabilities caps = capabilities();
  if (request.want_logprobs && !caps.supports_logprobs) {
    throw CapabilityError(fmt::format("{} does not return token logprobs", backend_id_));
  }

  const std::string started = utc_timestamp();
  std::vector<AttemptRecord> attempts;
  std::vector<Completion> completions;
  if (request.n > 1 && !caps.supports_n) {
    for (int i = 0; i < request.n; ++i) {
      CompletionRequest single = request;
      single.n = 1;
      single.seed = request.seed.value_or(0) + i;
      auto one = send_with_retry(single, attempts);
      if (one.size() != 1) {
        throw ValidationError(fmt::format("{} returned {} completions for n=1", backend_id_, one.size()));
      }
      completions.push_back(std::move(one.front()));
    }
  } else {
    completions = send_with_retry(request, attempts);
  }
  if (static_cast<int>(completions.size()) != request.n) {
    throw ValidationError(fmt::format("{} returned {} completions, expected {}", backend_id_,
                                      completions.size(), request.n));
  }
  for (const auto& c : completions) {
    check_completion(c);
    if (request.want_logprobs && !c.token_logprobs) {
      throw CapabilityError(fmt::format("{} omitted logprobs from a reply", backend_id_));
    }
  }

  nlohmann::json comps = nlohmann::json::array();
  for (const auto& c : completions) comps.push_back(to_json(c));
  log_->append({{"kind", "completion"},
                {"request_hash", hash},
                {"backend", backend_id_},
                {"request", to_json(request)},
                {"completions", std::move(comps)},
                {"attempts", attempts_json(attempts)},
                {"timestamps", {{"started", started}, {"finished", utc_timestamp()}}}});
  return completions;
}

// ---------------------------------------------------------------------------
// ReplayBackend

ReplayBackend::ReplayBackend(std::string backend_id, std::shared_ptr<const RequestLog> recorded)
    : id_(std::move(backend_id)), recorded_(std::move(recorded)) {}

Capabilities ReplayBackend::capabilities() {
  Capabilities caps{true, true, true};
  if (auto e = recorded_->find("capabilities", id_)) caps = capabilities_from_json(e->at("capabilities"));
  // Recorded entries are whole multi-sample requests, so never split them.
  caps.supports_n = true;
  return caps;
}

std::vector<Completion> ReplayBackend::send(const CompletionRequest& request) {
  const std::string hash = request_hash(id_, request);
  const auto e = recorded_->find("completion", hash);
  if (!e) throw TransportError(fmt::format("replay miss for {} request {}", id_, hash), 0, false);
  std::vector<Completion> out;
  for (const auto& c : e->at("completions")) out.push_back(completion_from_json(c));
  return out;
}

}  // namespace press::llm
