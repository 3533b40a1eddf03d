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

#include "press/stance_judge.hpp"

#include <algorithm>

#include <fmt/format.h>

#include "press/util.hpp"

namespace press::judge {

std::string agree_hypothesis(const std::string& statement_text) {
  return std::string(kAgreeHypothesisPrefix) + statement_text;
}

std::string disagree_hypothesis(const std::string& statement_text) {
  return std::string(kDisagreeHypothesisPrefix) + statement_text;
}

AgreementSignal judge_agreement(const std::string& response_text, const std::string& statement_text,
                                NliClassifier& nli, double threshold) {
  if (trim(response_text).empty()) throw ContractViolation("cannot judge an empty response");
  if (trim(statement_text).empty()) throw ContractViolation("cannot judge against an empty statement");

  AgreementSignal s;
  s.agree_verdict = nli.classify(response_text, agree_hypothesis(statement_text));
  validate_verdict(s.agree_verdict);
  s.disagree_verdict = nli.classify(response_text, disagree_hypothesis(statement_text));
  validate_verdict(s.disagree_verdict);

  const double ea = s.agree_verdict.entailment;
  const double ed = s.disagree_verdict.entailment;
  s.confidence = std::max(ea, ed);
  if (ea > ed && ea >= threshold) {
    s.g = Agreement::Agree;
  } else if (ed > ea && ed >= threshold) {
    s.g = Agreement::Disagree;
  } else {
    s.g = Agreement::Abstain;
  }
  return s;
}

std::optional<Direction> direction(Agreement g, Direction bias) {
  if (g == Agreement::Abstain) return std::nullopt;
  return direction_from_sign(static_cast<int>(g) * sign(bias));
}

std::optional<Direction> direction(const AgreementSignal& signal, Direction bias) {
  return direction(signal.g, bias);
}

bool nli_entails(const std::string& premise, const std::string& hypothesis, NliClassifier& nli) {
  if (premise.empty() || hypothesis.empty()) throw ContractViolation("NLI texts must be non-empty");
  const NliVerdict v = nli.classify(premise, hypothesis);
  validate_verdict(v);
  return v.entailment > v.neutral && v.entailment > v.contradiction;
}

std::string_view to_string(Agreement g) {
  switch (g) {
    case Agreement::Agree: return "agree";
    case Agreement::Disagree: return "disagree";
    case Agreement::Abstain: return "abstain";
  }
  return "?";
}

nlohmann::json to_json(const AgreementSignal& s) {
  return {{"g", std::string(to_string(s.g))},
          {"confidence", s.confidence},
          {"agree", to_json(s.agree_verdict)},
          {"disagree", to_json(s.disagree_verdict)}};
}

AgreementSignal agreement_from_json(const nlohmann::json& j) {
  AgreementSignal s;
  const std::string g = j.at("g").get<std::string>();
  if (g == "agree") s.g = Agreement::Agree;
  else if (g == "disagree") s.g = Agreement::Disagree;
  else if (g == "abstain") s.g = Agreement::Abstain;
  else throw ParseError(fmt::format("unknown agreement '{}'", g));
  s.confidence = j.at("confidence").get<double>();
  s.agree_verdict = verdict_from_json(j.at("agree"));
  s.disagree_verdict = verdict_from_json(j.at("disagree"));
  return s;
}

}  // namespace press::judge
