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

#include "press/reversal.hpp"

#include <fmt/format.h>

namespace press::reversal {

using typology::Label;

std::string_view to_string(FamilyKind k) {
  switch (k) {
    case FamilyKind::ArgumentVariation: return "ArgumentVariation";
    case FamilyKind::PersonaGrid: return "PersonaGrid";
    case FamilyKind::CheckpointPair: return "CheckpointPair";
  }
  return "?";
}

std::string_view to_string(Outcome o) {
  switch (o) {
    case Outcome::SF: return "SF";
    case Outcome::SU: return "SU";
    case Outcome::ID: return "ID";
  }
  return "?";
}

void ConditionFamily::validate(int expected_variants) const {
  size_t expected = 0;
  switch (kind) {
    case FamilyKind::ArgumentVariation: expected = static_cast<size_t>(expected_variants); break;
    case FamilyKind::PersonaGrid: expected = 9; break;
    case FamilyKind::CheckpointPair: expected = 2; break;
  }
  if (members.size() != expected) {
    throw ValidationError(fmt::format("{} family has {} members, expected {}", to_string(kind), members.size(),
                                      expected));
  }
}

ReversalOutcome outcome(const std::vector<std::optional<Label>>& labels) {
  if (labels.empty()) throw ContractViolation("outcome of an empty condition family");
  ReversalOutcome out;
  for (const auto& l : labels) {
    if (l && typology::is_stable(*l)) out.stable_directions.insert(typology::label_direction(*l));
  }
  switch (out.stable_directions.size()) {
    case 0: out.value = Outcome::ID; break;
    case 1: out.value = Outcome::SF; break;
    default: out.value = Outcome::SU; break;
  }
  return out;
}

ReversalOutcome outcome(const std::vector<typology::LabelOutcome>& labels) {
  std::vector<std::optional<Label>> plain;
  plain.reserve(labels.size());
  for (const auto& l : labels) plain.push_back(l ? std::optional<Label>(l->value) : std::nullopt);
  return outcome(plain);
}

OutcomeProportions outcome_proportions(const std::vector<std::optional<Outcome>>& outcomes) {
  OutcomeProportions p;
  int sf = 0, su = 0, id = 0;
  for (const auto& o : outcomes) {
    if (!o) continue;
    ++p.n_topics;
    if (*o == Outcome::SF) ++sf;
    if (*o == Outcome::SU) ++su;
    if (*o == Outcome::ID) ++id;
  }
  if (p.n_topics > 0) {
    p.p_sf = 100.0 * sf / p.n_topics;
    p.p_su = 100.0 * su / p.n_topics;
    p.p_id = 100.0 * id / p.n_topics;
  }
  return p;
}

double TransitionMatrix::probability(Label from, Label to) const {
  return probabilities[typology::label_index(from)][typology::label_index(to)];
}

int TransitionMatrix::count(Label from, Label to) const {
  return counts[typology::label_index(from)][typology::label_index(to)];
}

TransitionMatrix transition_matrix(const TopicLabels& before, const TopicLabels& after) {
  if (before.size() != after.size()) {
    throw ContractViolation(fmt::format("before covers {} topics, after covers {}", before.size(), after.size()));
  }
  TransitionMatrix m;
  for (const auto& [topic, b] : before) {
    const auto it = after.find(topic);
    if (it == after.end()) throw ContractViolation(fmt::format("topic '{}' missing from the after labels", topic));
    if (!b || !it->second) {
      ++m.n_dropped;
      continue;
    }
    ++m.counts[typology::label_index(*b)][typology::label_index(*it->second)];
  }
  for (size_t r = 0; r < 4; ++r) {
    int row = 0;
    for (int c : m.counts[r]) row += c;
    if (row == 0) continue;
    for (size_t c = 0; c < 4; ++c) m.probabilities[r][c] = static_cast<double>(m.counts[r][c]) / row;
  }
  return m;
}

}  // namespace press::reversal
