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

// Stability-faithfulness of topic labels across condition families and
// before/after transition statistics.

#ifndef PRESS_REVERSAL_HPP_
#define PRESS_REVERSAL_HPP_

#include <array>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "press/typology.hpp"

namespace press::reversal {

enum class FamilyKind { ArgumentVariation, PersonaGrid, CheckpointPair };
std::string_view to_string(FamilyKind k);

struct ConditionFamily {
  FamilyKind kind = FamilyKind::ArgumentVariation;
  // Variant indices, persona/argument cells, or endpoint names.
  std::vector<std::string> members;

  // ArgumentVariation: expected_variants members; PersonaGrid: 3x3 cells;
  // CheckpointPair: 2 endpoints. Throws ValidationError otherwise.
  void validate(int expected_variants = 3) const;
};

enum class Outcome { SF, SU, ID };
std::string_view to_string(Outcome o);

struct ReversalOutcome {
  Outcome value = Outcome::ID;
  std::set<Direction> stable_directions;
};

// Empty family -> ContractViolation. Abstained entries contribute nothing, so
// an all-abstained family is ID.
ReversalOutcome outcome(const std::vector<typology::LabelOutcome>& labels);
ReversalOutcome outcome(const std::vector<std::optional<typology::Label>>& labels);

struct OutcomeProportions {
  double p_sf = 0.0;
  double p_su = 0.0;
  double p_id = 0.0;
  int n_topics = 0;
};

// Percentages over topics with a defined outcome.
OutcomeProportions outcome_proportions(const std::vector<std::optional<Outcome>>& outcomes);

struct TransitionMatrix {
  // [before][after] in typology::kAllLabels order.
  std::array<std::array<int, 4>, 4> counts{};
  std::array<std::array<double, 4>, 4> probabilities{};
  int n_dropped = 0;

  double probability(typology::Label from, typology::Label to) const;
  int count(typology::Label from, typology::Label to) const;
};

using TopicLabels = std::map<std::string, std::optional<typology::Label>>;

// Both maps must cover the same topics (ContractViolation otherwise); topics
// abstained on either side are dropped. Empty rows stay all-zero.
TransitionMatrix transition_matrix(const TopicLabels& before, const TopicLabels& after);

}  // namespace press::reversal

#endif  // PRESS_REVERSAL_HPP_
