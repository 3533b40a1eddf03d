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

// Uniform completion interface over chat endpoints and offline backends, with
// retry, multi-sample emulation and an append-only request log.

#ifndef PRESS_GATEWAY_HPP_
#define PRESS_GATEWAY_HPP_

#include <atomic>
#include <chrono>
#include <cstdint>
#include <filesystem>
#include <functional>
#include <fstream>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "press/common.hpp"

namespace press::llm {

struct CompletionRequest {
  std::string model;
  std::string prompt;
  double temperature = 0.0;
  int n = 1;
  int max_tokens = 256;
  bool want_logprobs = false;
  std::optional<int64_t> seed;

  // Throws ContractViolation (e.g. temperature 0 with n > 1).
  void validate() const;
};

struct TokenLogprob {
  std::string token;
  double logprob = 0.0;  // nats, <= 0
};

struct Completion {
  std::string text;
  std::optional<std::vector<TokenLogprob>> token_logprobs;
  std::string finish_reason = "stop";

  // Mean per-token log-probability; nullopt when logprobs are absent.
  std::optional<double> mean_logprob() const;
  std::optional<double> total_logprob() const;
};

struct Capabilities {
  bool supports_logprobs = false;
  bool supports_n = false;
  bool supports_seed = false;
};

// Failure of a single backend attempt. status is the HTTP status, or 0 when
// the connection itself failed.
class TransportError : public Error {
 public:
  TransportError(const std::string& what, int status, bool retryable)
      : Error(what), status_(status), retryable_(retryable) {}
  int status() const { return status_; }
  bool retryable() const { return retryable_; }

 private:
  int status_;
  bool retryable_;
};

struct AttemptRecord {
  int attempt = 0;
  int status = 200;
  std::string error;
  std::string timestamp;
};

class RetryExhaustedError : public Error {
 public:
  RetryExhaustedError(const std::string& what, std::vector<AttemptRecord> attempts)
      : Error(what), attempts_(std::move(attempts)) {}
  const std::vector<AttemptRecord>& attempts() const { return attempts_; }

 private:
  std::vector<AttemptRecord> attempts_;
};

// Single-attempt transport. Implementations throw TransportError on failure;
// retry and logging live in Gateway.
class Backend {
 public:
  virtual ~Backend() = default;
  // Identity folded into request hashes; distinct endpoints need distinct ids.
  virtual std::string id() const = 0;
  virtual Capabilities capabilities() = 0;
  virtual std::vector<Completion> send(const CompletionRequest& request) = 0;
};

std::string request_hash(const std::string& backend_id, const CompletionRequest& request);

nlohmann::json to_json(const CompletionRequest& r);
CompletionRequest request_from_json(const nlohmann::json& j);
nlohmann::json to_json(const Completion& c);
Completion completion_from_json(const nlohmann::json& j);
nlohmann::json to_json(const Capabilities& c);
Capabilities capabilities_from_json(const nlohmann::json& j);

// Append-only JSONL log shared by all backends of a run. Entries carry a
// `kind` ("completion", "nli", "capabilities") and a `request_hash`. Writes
// are serialized through one mutex; the file is flushed after every entry.
class RequestLog {
 public:
  // In-memory only.
  RequestLog() = default;
  // Loads existing entries from `path` (if present) and appends new ones to it.
  explicit RequestLog(std::filesystem::path path);

  RequestLog(const RequestLog&) = delete;
  RequestLog& operator=(const RequestLog&) = delete;

  void append(nlohmann::json entry);
  std::optional<nlohmann::json> find(const std::string& kind, const std::string& hash) const;
  std::vector<nlohmann::json> entries() const;
  size_t size() const;

 private:
  mutable std::mutex mu_;
  std::optional<std::filesystem::path> path_;
  std::ofstream out_;
  std::vector<nlohmann::json> entries_;
  std::map<std::pair<std::string, std::string>, size_t> index_;
};

struct RetryPolicy {
  int max_retries = 5;
  std::chrono::milliseconds base_delay{500};
  double factor = 2.0;
  bool jitter = true;
  // Replaceable for tests.
  std::function<void(std::chrono::milliseconds)> sleep;
};

class Gateway {
 public:
  Gateway(std::shared_ptr<Backend> backend, std::shared_ptr<RequestLog> log,
          RetryPolicy retry = {});

  // Returns request.n completions. Served from the log when an identical
  // request (same backend id) was already recorded; otherwise sent with
  // retry and logged before returning. Backends without native multi-sample
  // support receive n single-sample requests with seeds seed, seed+1, ...
  std::vector<Completion> complete(const CompletionRequest& request);

  // Probed with retry on first use, then cached and recorded in the log.
  Capabilities capabilities();

  const std::string& backend_id() const { return backend_id_; }
  // Number of backend send() attempts and capability probes made by this gateway.
  uint64_t backend_calls() const { return backend_calls_.load(); }

 private:
  // Runs `call` until it succeeds, fails non-retryably or exhausts the budget.
  void retrying(const std::string& jitter_key, std::vector<AttemptRecord>& attempts,
                const std::function<void()>& call);
  std::vector<Completion> send_with_retry(const CompletionRequest& request,
                                          std::vector<AttemptRecord>& attempts);

  std::shared_ptr<Backend> backend_;
  std::shared_ptr<RequestLog> log_;
  RetryPolicy retry_;
  std::string backend_id_;
  std::mutex caps_mu_;
  std::optional<Capabilities> caps_;
  std::atomic<uint64_t> backend_calls_{0};
};

// Serves recorded completions for one backend id; anything missing from the
// log is a TransportError (non-retryable). Capabilities come from the log.
class ReplayBackend : public Backend {
 public:
  ReplayBackend(std::string backend_id, std::shared_ptr<const RequestLog> recorded);
  std::string id() const override { return id_; }
  Capabilities capabilities() override;
  std::vector<Completion> send(const CompletionRequest& request) override;

 private:
  std::string id_;
  std::shared_ptr<const RequestLog> recorded_;
};

}  // namespace press::llm

#endif  // PRESS_GATEWAY_HPP_
