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

#include "press/typology.hpp"

#include <cmath>

#include <fmt/format.h>

namespace press::typology {

std::string_view to_string(Label l) {
  switch (l) {
    case Label::SL: return "S_L";
    case Label::UL: return "U_L";
    case Label::SR: return "S_R";
    case Label::UR: return "U_R";
  }
  return "?";
}

std::optional<Label> parse_label(std::string_view s) {
  for (Label l : kAllLabels) {
    if (to_string(l) == s) return l;
  }
  return std::nullopt;
}

size_t label_index(Label l) {
  switch (l) {
    case Label::SL: return 0;
    case Label::UL: return 1;
    case Label::SR: return 2;
    case Label::UR: return 3;
  }
  return 0;
}

int stance_persistence(Direction o, Direction a) { return o == a ? 1 : 0; }

int bias_alignment(Direction o, Direction b) {
  const bool right = (b == Direction::Right && o == b) || (b == Direction::Left && o != b);
  return right ? 1 : 0;
}

Label label_from(int delta, int i_b) {
  if (delta == 1) return i_b == 1 ? Label::SR : Label::SL;
  return i_b == 1 ? Label::UR : Label::UL;
}

LabelOutcome classify(Direction o, std::optional<Direction> a_support, std::optional<Direction> a_counter,
                      Direction b) {
  if (!a_support || !a_counter) return std::nullopt;
  TypologyLabel l;
  l.o = o;
  l.a_support = a_support;
  l.a_counter = a_counter;
  l.delta = stance_persistence(o, *a_support) & stance_persistence(o, *a_counter);
  l.i_b = bias_alignment(o, b);
  l.value = label_from(l.delta, l.i_b);
  return l;
}

StabilityScore stability_score(const std::vector<std::optional<Label>>& labels) {
  StabilityScore out;
  out.n_variants = static_cast<int>(labels.size());
  int stable = 0;
  for (const auto& l : labels) {
    if (!l) {
      ++out.n_abstained;
    } else if (is_stable(*l)) {
      ++stable;
    }
  }
  const int denom = out.n_variants - out.n_abstained;
  if (denom > 0) {
    out.s = static_cast<double>(stable) / denom;
  } else {
    out.diagnostic = fmt::format("all {} variants abstained", out.n_variants);
  }
  return out;
}

StabilityScore stability_score(const std::vector<LabelOutcome>& labels) {
  std::vector<std::optional<Label>> plain;
  plain.reserve(labels.size());
  for (const auto& l : labels) plain.push_back(l ? std::optional<Label>(l->value) : std::nullopt);
  return stability_score(plain);
}

std::string_view to_string(Group g) { return g == Group::LeftLeaning ? "Left-leaning" : "Right-leaning"; }

double ci_half_width(double p, int n, CiMethod method) {
  if (n <= 0) return 0.0;
  constexpr double z = 1.96;
  const double nn = n;
  if (method == CiMethod::Normal) return z * std::sqrt(p * (1.0 - p) / nn);
  const double denom = 1.0 + z * z / nn;
  return z * std::sqrt(p * (1.0 - p) / nn + z * z / (4.0 * nn * nn)) / denom;
}

std::vector<ClassDistribution> class_distribution(const std::vector<GroupedLabel>& labels, CiMethod method,
                                                  std::vector<std::string>* warnings) {
  std::vector<ClassDistribution> out;
  for (Group g : {Group::LeftLeaning, Group::RightLeaning}) {
    ClassDistribution d;
    d.group = g;
    bool seen = false;
    for (const auto& gl : labels) {
      if (gl.group != g) continue;
      seen = true;
      if (!gl.label) {
        ++d.n_abstained;
        continue;
      }
      ++d.n;
      ++d.shares[label_index(*gl.label)].count;
    }
    if (!seen || d.n == 0) {
      if (warnings) warnings->push_back(fmt::format("group {} has no labelled instances; omitted", to_string(g)));
      continue;
    }
    for (auto& s : d.shares) {
      const double p = static_cast<double>(s.count) / d.n;
      s.percent = 100.0 * p;
      s.ci_half_width = 100.0 * ci_half_width(p, d.n, method);
    }
    out.push_back(d);
  }
  return out;
}

nlohmann::json to_json(const TypologyLabel& l) {
  auto dir = [](std::optional<Direction> d) {
    return d ? nlohmann::json(sign(*d)) : nlohmann::json(nullptr);
  };
  return {{"label", std::string(to_string(l.value))},
          {"delta", l.delta},
          {"i_b", l.i_b},
          {"o", sign(l.o)},
          {"a_support", dir(l.a_support)},
          {"a_counter", dir(l.a_counter)}};
}

TypologyLabel typology_label_from_json(const nlohmann::json& j) {
  TypologyLabel l;
  const auto v = parse_label(j.at("label").get<std::string>());
  if (!v) throw ValidationError(fmt::format("unknown label {}", j.at("label").dump()));
  l.value = *v;
  l.delta = j.at("delta").get<int>();
  l.i_b = j.at("i_b").get<int>();
  l.o = direction_from_sign(j.at("o").get<int>());
  if (!j.at("a_support").is_null()) l.a_support = direction_from_sign(j["a_support"].get<int>());
  if (!j.at("a_counter").is_null()) l.a_counter = direction_from_sign(j["a_counter"].get<int>());
  return l;
}

}  // namespace press::typology
