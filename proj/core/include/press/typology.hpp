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

// Four-class stance typology, topic-wise stability score and class
// distributions with confidence intervals.
//
// Directions follow the response-direction reading: o and a are ideological
// directions (agreement times statement bias), so the right-alignment
// indicator reduces to [o = Right] for either bias.

#ifndef PRESS_TYPOLOGY_HPP_
#define PRESS_TYPOLOGY_HPP_

#include <array>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json.hpp>

#include "press/common.hpp"

namespace press::typology {

enum class Label { SL, UL, SR, UR };

// Table order: S^L, U^L, S^R, U^R.
inline constexpr std::array<Label, 4> kAllLabels = {Label::SL, Label::UL, Label::SR, Label::UR};

std::string_view to_string(Label l);  // "S_L", ...
std::optional<Label> parse_label(std::string_view s);
size_t label_index(Label l);  // position in kAllLabels
inline bool is_stable(Label l) { return l == Label::SL || l == Label::SR; }
inline Direction label_direction(Label l) {
  return (l == Label::SR || l == Label::UR) ? Direction::Right : Direction::Left;
}

struct TypologyLabel {
  Label value = Label::SL;
  int delta = 0;
  int i_b = 0;
  Direction o = Direction::Left;
  std::optional<Direction> a_support;
  std::optional<Direction> a_counter;
};

// nullopt means the instance abstained.
using LabelOutcome = std::optional<TypologyLabel>;

int stance_persistence(Direction o, Direction a);
int bias_alignment(Direction o, Direction b);
Label label_from(int delta, int i_b);

// Stable requires persistence under both the supporting and the counter
// argument. Either post-argument stance missing -> abstained.
LabelOutcome classify(Direction o, std::optional<Direction> a_support,
                      std::optional<Direction> a_counter, Direction b);

struct StabilityScore {
  std::string topic_id;
  std::string model_id;
  std::optional<double> s;
  int n_variants = 0;
  int n_abstained = 0;
  std::string diagnostic;
};

StabilityScore stability_score(const std::vector<LabelOutcome>& labels);
StabilityScore stability_score(const std::vector<std::optional<Label>>& labels);

enum class Group { LeftLeaning, RightLeaning };
std::string_view to_string(Group g);

enum class CiMethod { Normal, Wilson };

struct ClassShare {
  double percent = 0.0;
  double ci_half_width = 0.0;  // percentage points
  int count = 0;
};

struct ClassDistribution {
  Group group = Group::LeftLeaning;
  std::array<ClassShare, 4> shares;  // kAllLabels order
  int n = 0;                         // non-abstained instances
  int n_abstained = 0;
};

struct GroupedLabel {
  Group group;
  std::optional<Label> label;
};

// Half-width of a 95% interval for a proportion, as a fraction.
double ci_half_width(double p, int n, CiMethod method = CiMethod::Normal);

// One entry per non-empty group, LeftLeaning first. Empty groups are omitted
// and named in `warnings` when given.
std::vector<ClassDistribution> class_distribution(const std::vector<GroupedLabel>& labels,
                                                  CiMethod method = CiMethod::Normal,
                                                  std::vector<std::string>* warnings = nullptr);

nlohmann::json to_json(const TypologyLabel& l);
TypologyLabel typology_label_from_json(const nlohmann::json& j);

}  // namespace press::typology

#endif  // PRESS_TYPOLOGY_HPP_
