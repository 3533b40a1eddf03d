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

// Agreement judgment of free-text responses and conversion to ideological
// direction.

#ifndef PRESS_STANCE_JUDGE_HPP_
#define PRESS_STANCE_JUDGE_HPP_

#include <optional>
#include <string>
#include <string_view>

#include <nlohmann/json.hpp>

#include "press/common.hpp"
#include "press/nli.hpp"

namespace press::judge {

inline constexpr double kDefaultAbstainThreshold = 0.5;

inline constexpr std::string_view kAgreeHypothesisPrefix =
    "The author of this response agrees with the statement: ";
inline constexpr std::string_view kDisagreeHypothesisPrefix =
    "The author of this response disagrees with the statement: ";

enum class Agreement : int8_t { Disagree = -1, Abstain = 0, Agree = +1 };

struct AgreementSignal {
  Agreement g = Agreement::Abstain;
  double confidence = 0.0;
  NliVerdict agree_verdict;
  NliVerdict disagree_verdict;
};

std::string agree_hypothesis(const std::string& statement_text);
std::string disagree_hypothesis(const std::string& statement_text);

AgreementSignal judge_agreement(const std::string& response_text, const std::string& statement_text,
                                NliClassifier& nli, double threshold = kDefaultAbstainThreshold);

// g * b; nullopt for Abstain.
std::optional<Direction> direction(const AgreementSignal& signal, Direction bias);
std::optional<Direction> direction(Agreement g, Direction bias);

// True iff entailment is the arg-max class.
bool nli_entails(const std::string& premise, const std::string& hypothesis, NliClassifier& nli);

std::string_view to_string(Agreement g);
nlohmann::json to_json(const AgreementSignal& s);
AgreementSignal agreement_from_json(const nlohmann::json& j);

}  // namespace press::judge

#endif  // PRESS_STANCE_JUDGE_HPP_
