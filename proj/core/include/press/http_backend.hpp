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

#ifndef PRESS_HTTP_BACKEND_HPP_
#define PRESS_HTTP_BACKEND_HPP_

#include <chrono>
#include <mutex>
#include <optional>
#include <string>
#include <vector>

#include "press/gateway.hpp"

namespace press::llm {

struct HttpBackendOptions {
  // e.g. "http://localhost:8000" or "https://api.example.com/v1"
  std::string base_url;
  std::string model;
  // Resolved secret; empty means no Authorization header.
  std::string api_key;
  std::chrono::seconds timeout{120};
  // Skip probing and use these instead.
  std::optional<Capabilities> capabilities_override;
};

// OpenAI-compatible `/v1/chat/completions` client.
class HttpChatBackend : public Backend {
 public:
  explicit HttpChatBackend(HttpBackendOptions options);

  std::string id() const override;
  // Probes the endpoint once: a two-sample request with logprobs, then
  // progressively simpler requests if that is rejected.
  Capabilities capabilities() override;
  std::vector<Completion> send(const CompletionRequest& request) override;

  // Exposed for tests.
  static nlohmann::json build_body(const CompletionRequest& request);
  static std::vector<Completion> parse_reply(const nlohmann::json& reply, bool want_logprobs);

 private:
  struct RawReply {
    int status = 0;
    std::string body;
    std::string error;
  };
  RawReply post(const nlohmann::json& body) const;

  HttpBackendOptions options_;
  std::string scheme_host_port_;
  std::string chat_path_;
  std::mutex probe_mu_;
  std::optional<Capabilities> probed_;
};

// Splits "scheme://host:port/prefix" into ("scheme://host:port", "/prefix").
std::pair<std::string, std::string> split_base_url(const std::string& base_url);

bool is_retryable_status(int status);

}  // namespace press::llm

#endif  // PRESS_HTTP_BACKEND_HPP_
