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

#include "press/http_backend.hpp"

#include <fmt/format.h>
#include <httplib.h>

#include "press/util.hpp"

namespace press::llm {

std::pair<std::string, std::string> split_base_url(const std::string& base_url) {
  const auto scheme_end = base_url.find("://");
  if (scheme_end == std::string::npos) {
    throw ValidationError(fmt::format("base URL '{}' has no scheme", base_url));
  }
  const auto path_start = base_url.find('/', scheme_end + 3);
  if (path_start == std::string::npos) return {base_url, ""};
  std::string prefix = base_url.substr(path_start);
  while (!prefix.empty() && prefix.back() == '/') prefix.pop_back();
  return {base_url.substr(0, path_start), prefix};
}

bool is_retryable_status(int status) {
  return status == 0 || status == 408 || status == 409 || status == 429 || status >= 500;
}

HttpChatBackend::HttpChatBackend(HttpBackendOptions options) : options_(std::move(options)) {
  auto [host, prefix] = split_base_url(options_.base_url);
  scheme_host_port_ = std::move(host);
  const bool has_v1 = prefix.size() >= 3 && prefix.compare(prefix.size() - 3, 3, "/v1") == 0;
  chat_path_ = prefix + (has_v1 ? "/chat/completions" : "/v1/chat/completions");
}

std::string HttpChatBackend::id() const { return fmt::format("http:{}#{}", options_.base_url, options_.model); }

nlohmann::json HttpChatBackend::build_body(const CompletionRequest& request) {
  nlohmann::json body = {
      {"model", request.model},
      {"messages", nlohmann::json::array({{{"role", "user"}, {"content", request.prompt}}})},
      {"temperature", request.temperature},
      {"n", request.n},
      {"max_tokens", request.max_tokens},
  };
  if (request.seed) body["seed"] = *request.seed;
  if (request.want_logprobs) body["logprobs"] = true;
  return body;
}

std::vector<Completion> HttpChatBackend::parse_reply(const nlohmann::json& reply, bool want_logprobs) {
  std::vector<Completion> out;
  try {
    for (const auto& choice : reply.at("choices")) {
      Completion c;
      const auto& msg = choice.at("message");
      c.text = msg.contains("content") && msg["content"].is_string() ? msg["content"].get<std::string>() : "";
      if (choice.contains("finish_reason") && choice["finish_reason"].is_string()) {
        c.finish_reason = choice["finish_reason"].get<std::string>();
      }
      if (want_logprobs && choice.contains("logprobs") && choice["logprobs"].is_object() &&
          choice["logprobs"].contains("content") && choice["logprobs"]["content"].is_array() &&
          !choice["logprobs"]["content"].empty()) {
        std::vector<TokenLogprob> toks;
        for (const auto& t : choice["logprobs"]["content"]) {
          toks.push_back({t.at("token").get<std::string>(), t.at("logprob").get<double>()});
        }
        c.token_logprobs = std::move(toks);
      }
      out.push_back(std::move(c));
    }
  } catch (const nlohmann::json::exception& e) {
    throw TransportError(fmt::format("malformed chat completion reply: {}", e.what()), 200, false);
  }
  return out;
}

HttpChatBackend::RawReply HttpChatBackend::post(const nlohmann::json& body) const {
  httplib::Client cli(scheme_host_port_);
  cli.set_connection_timeout(options_.timeout);
  cli.set_read_timeout(options_.timeout);
  cli.set_write_timeout(options_.timeout);
  httplib::Headers headers;
  if (!options_.api_key.empty()) headers.emplace("Authorization", "Bearer " + options_.api_key);
  auto res = cli.Post(chat_path_, headers, body.dump(), "application/json");
  if (!res) return {0, "", httplib::to_string(res.error())};
  return {res->status, res->body, ""};
}

Capabilities HttpChatBackend::capabilities() {
  if (options_.capabilities_override) return *options_.capabilities_override;
  std::lock_guard lock(probe_mu_);
  if (probed_) return *probed_;

  CompletionRequest probe;
  probe.model = options_.model;
  probe.prompt = "Reply with the single word: ok";
  probe.temperature = 1.0;
  probe.max_tokens = 1;
  probe.seed = 0;

  Capabilities caps;
  caps.supports_seed = true;
  const auto try_probe = [&](int n, bool logprobs) -> std::optional<nlohmann::json> {
    probe.n = n;
    probe.want_logprobs = logprobs;
    const RawReply r = post(build_body(probe));
    if (r.status == 0) throw TransportError(fmt::format("capability probe: {}", r.error), 0, true);
    if (r.status != 200) {
      if (is_retryable_status(r.status)) {
        throw TransportError(fmt::format("capability probe: HTTP {}", r.status), r.status, true);
      }
      return std::nullopt;
    }
    return nlohmann::json::parse(r.body, nullptr, false);
  };

  if (auto reply = try_probe(2, true); reply && !reply->is_discarded()) {
    const auto completions = parse_reply(*reply, true);
    caps.supports_n = completions.size() >= 2;
    caps.supports_logprobs = !completions.empty() && completions.front().token_logprobs.has_value();
  } else if (auto single = try_probe(1, true); single && !single->is_discarded()) {
    const auto completions = parse_reply(*single, true);
    caps.supports_logprobs = !completions.empty() && completions.front().token_logprobs.has_value();
  } else if (auto plain = try_probe(1, false); plain && !plain->is_discarded()) {
    caps.supports_logprobs = false;
  } else {
    throw TransportError(fmt::format("{}: endpoint rejected every capability probe", id()), 400, false);
  }
  probed_ = caps;
  return caps;
}

std::vector<Completion> HttpChatBackend::send(const CompletionRequest& request) {
  CompletionRequest req = request;
  if (req.model.empty()) req.model = options_.model;
  const RawReply r = post(build_body(req));
  if (r.status == 0) throw TransportError(fmt::format("{}: {}", id(), r.error), 0, true);
  if (r.status != 200) {
    std::string snippet = r.body.substr(0, 200);
    throw TransportError(fmt::format("{}: HTTP {} {}", id(), r.status, snippet), r.status,
                         is_retryable_status(r.status));
  }
  const auto reply = nlohmann::json::parse(r.body, nullptr, false);
  if (reply.is_discarded()) throw TransportError(fmt::format("{}: reply is not JSON", id()), 200, false);
  return parse_reply(reply, req.want_logprobs);
}

}  // namespace press::llm
