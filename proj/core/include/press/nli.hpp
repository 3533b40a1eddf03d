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

// Three-way natural language inference backends.

#ifndef PRESS_NLI_HPP_
#define PRESS_NLI_HPP_

#include <atomic>
#include <chrono>
#include <map>
#include <memory>
#include <string>
#include <utility>
#include <vector>

#include <nlohmann/json.hpp>

#include "press/common.hpp"

namespace press::llm {
class RequestLog;
}

namespace press::judge {

struct NliVerdict {
  double entailment = 0.0;
  double neutral = 0.0;
  double contradiction = 0.0;
};

// Throws ValidationError unless each probability is in [0,1] and they sum to
// 1 within 1e-6.
void validate_verdict(const NliVerdict& v);

nlohmann::json to_json(const NliVerdict& v);
NliVerdict verdict_from_json(const nlohmann::json& j);

class NliClassifier {
 public:
  virtual ~NliClassifier() = default;
  virtual std::string id() const = 0;
  virtual NliVerdict classify(const std::string& premise, const std::string& hypothesis) = 0;
};

// POST {premise, hypothesis} -> {entailment, neutral, contradiction}.
// Transport failures throw llm::TransportError.
class HttpNli : public NliClassifier {
 public:
  explicit HttpNli(std::string url, std::chrono::seconds timeout = std::chrono::seconds{60});
  std::string id() const override { return "http-nli:" + url_; }
  NliVerdict classify(const std::string& premise, const std::string& hypothesis) override;

 private:
  std::string url_;
  std::string host_;
  std::string path_;
  std::chrono::seconds timeout_;
};

// Lexicon classifier for offline tests. Agreement hypotheses are scored from
// "I agree" / "I disagree" cues in the premise (or the premise restating the
// statement); any other pair entails iff the normalised texts are equal.
class KeywordNli : public NliClassifier {
 public:
  std::string id() const override { return "keyword-nli"; }
  NliVerdict classify(const std::string& premise, const std::string& hypothesis) override;
};

// Table-driven classifier: explicit pair verdicts first, then meaning classes
// (texts in the same class entail each other, different classes contradict), then the
// keyword rule.
class ScriptedNli : public NliClassifier {
 public:
  std::string id() const override { return "scripted-nli"; }
  NliVerdict classify(const std::string& premise, const std::string& hypothesis) override;

  void set_pair(const std::string& premise, const std::string& hypothesis, NliVerdict v);
  // Texts matched by substring: a text belongs to the first class that has a
  // member occurring in it.
  void add_meaning_class(std::vector<std::string> members);
  void set_default(NliVerdict v) { default_ = v; has_default_ = true; }
  size_t calls() const { return calls_.load(); }

 private:
  int meaning_of(const std::string& text) const;

  std::map<std::pair<std::string, std::string>, NliVerdict> pairs_;
  std::vector<std::vector<std::string>> classes_;
  NliVerdict default_;
  bool has_default_ = false;
  KeywordNli keyword_;
  std::atomic<size_t> calls_{0};
};

// Caches verdicts in the request log (kind "nli") so runs can be resumed and
// replayed without the classifier.
class LoggedNli : public NliClassifier {
 public:
  LoggedNli(std::shared_ptr<NliClassifier> inner, std::shared_ptr<llm::RequestLog> log);
  std::string id() const override { return inner_->id(); }
  NliVerdict classify(const std::string& premise, const std::string& hypothesis) override;

 private:
  std::shared_ptr<NliClassifier> inner_;
  std::shared_ptr<llm::RequestLog> log_;
};

// Serves verdicts recorded under `classifier_id`; misses throw.
class ReplayNli : public NliClassifier {
 public:
  ReplayNli(std::string classifier_id, std::shared_ptr<const llm::RequestLog> recorded);
  std::string id() const override { return id_; }
  NliVerdict classify(const std::string& premise, const std::string& hypothesis) override;

 private:
  std::string id_;
  std::shared_ptr<const llm::RequestLog> recorded_;
};

std::string nli_hash(const std::string& classifier_id, const std::string& premise,
                     const std::string& hypothesis);

}  // namespace press::judge

#endif  // PRESS_NLI_HPP_
