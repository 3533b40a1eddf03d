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

#include <gtest/gtest.h>

#include <cmath>
#include <string>

#include "press/typology.hpp"

namespace press::typology {
namespace {

constexpr Direction L = Direction::Left;
constexpr Direction R = Direction::Right;

// Reference labelling written from the definitions: stable means the stance
// survives both arguments, and the subscript is the side of the unpressured
// answer.
std::string reference_label(int o, int a_s, int a_c) {
  const bool stable = (o == a_s) && (o == a_c);
  return std::string(stable ? "S" : "U") + (o > 0 ? "_R" : "_L");
}

TEST(Typology, AllSixteenCombinationsMatchReference) {
  for (int o : {-1, 1}) {
    for (int a_s : {-1, 1}) {
      for (int a_c : {-1, 1}) {
        for (int b : {-1, 1}) {
          const auto got = classify(direction_from_sign(o), direction_from_sign(a_s), direction_from_sign(a_c),
                                    direction_from_sign(b));
          ASSERT_TRUE(got.has_value());
          EXPECT_EQ(to_string(got->value), reference_label(o, a_s, a_c))
              << "o=" << o << " a_s=" << a_s << " a_c=" << a_c << " b=" << b;
        }
      }
    }
  }
}

TEST(Typology, BiasAlignmentIsOriginalSideRight) {
  for (int o : {-1, 1}) {
    for (int b : {-1, 1}) {
      EXPECT_EQ(bias_alignment(direction_from_sign(o), direction_from_sign(b)), o == 1 ? 1 : 0);
    }
  }
}

TEST(Typology, WorkedExamples) {
  EXPECT_EQ(classify(L, L, L, L)->value, Label::SL);
  EXPECT_EQ(classify(R, R, L, L)->value, Label::UR);
  EXPECT_EQ(classify(R, R, R, R)->value, Label::SR);
  EXPECT_EQ(classify(L, L, R, R)->value, Label::UL);
  const auto l = classify(L, R, L, L);
  EXPECT_EQ(l->delta, 0);
  EXPECT_EQ(l->i_b, 0);
}

TEST(Typology, MissingPostArgumentStanceAbstains) {
  EXPECT_FALSE(classify(L, std::nullopt, L, L).has_value());
  EXPECT_FALSE(classify(R, R, std::nullopt, L).has_value());
  EXPECT_FALSE(classify(R, std::nullopt, std::nullopt, R).has_value());
}

TEST(Typology, LabelFromIndicators) {
  EXPECT_EQ(label_from(1, 0), Label::SL);
  EXPECT_EQ(label_from(1, 1), Label::SR);
  EXPECT_EQ(label_from(0, 0), Label::UL);
  EXPECT_EQ(label_from(0, 1), Label::UR);
}

TEST(Typology, LabelNamesRoundTrip) {
  for (Label l : kAllLabels) {
    EXPECT_EQ(parse_label(to_string(l)), l);
    EXPECT_EQ(kAllLabels[label_index(l)], l);
  }
  EXPECT_FALSE(parse_label("S^Q").has_value());
}

TEST(StabilityScore, FractionOfStableVariants) {
  const auto s = stability_score(std::vector<std::optional<Label>>{Label::SL, Label::SL, Label::UL});
  ASSERT_TRUE(s.s.has_value());
  EXPECT_NEAR(*s.s, 2.0 / 3.0, 1e-15);
  EXPECT_EQ(s.n_variants, 3);
}

TEST(StabilityScore, AbstainedVariantsLeaveTheDenominator) {
  const auto s = stability_score(std::vector<std::optional<Label>>{Label::SR, std::nullopt, Label::UR});
  EXPECT_NEAR(*s.s, 0.5, 1e-15);
  EXPECT_EQ(s.n_abstained, 1);
}

TEST(StabilityScore, AllAbstainedIsUndefined) {
  const auto s = stability_score(std::vector<std::optional<Label>>{std::nullopt, std::nullopt});
  EXPECT_FALSE(s.s.has_value());
  EXPECT_NE(s.diagnostic.find("abstained"), std::string::npos);
}

TEST(StabilityScore, AcceptsLabelOutcomes) {
  std::vector<LabelOutcome> v = {classify(L, L, L, L), classify(L, R, L, L), std::nullopt};
  EXPECT_NEAR(*stability_score(v).s, 0.5, 1e-15);
}

TEST(ConfidenceInterval, NormalApproximationFormula) {
  for (int n : {5, 19, 76, 152}) {
    for (int k = 0; k <= n; k += 3) {
      const double p = static_cast<double>(k) / n;
      EXPECT_NEAR(ci_half_width(p, n), 1.96 * std::sqrt(p * (1 - p) / n), 1e-15);
    }
  }
}

TEST(ConfidenceInterval, WilsonIsNarrowerAtTheEdges) {
  EXPECT_GT(ci_half_width(0.0, 20, CiMethod::Wilson), 0.0);
  EXPECT_EQ(ci_half_width(0.0, 20, CiMethod::Normal), 0.0);
  EXPECT_NEAR(ci_half_width(0.5, 100, CiMethod::Wilson), 0.09617, 1e-4);
}

std::vector<GroupedLabel> counts(Group g, std::array<int, 4> c) {
  std::vector<GroupedLabel> out;
  for (size_t k = 0; k < 4; ++k) {
    for (int i = 0; i < c[k]; ++i) out.push_back({g, kAllLabels[k]});
  }
  return out;
}

std::string rounded(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.1f", v);
  return buf;
}

// Reference baseline counts: 152 left-leaning
// and 76 right-leaning topic-model instances.
TEST(ClassDistribution, ReproducesReferencePercentagesAndIntervals) {
  auto labels = counts(Group::LeftLeaning, {57, 53, 16, 26});
  const auto right = counts(Group::RightLeaning, {10, 16, 34, 16});
  labels.insert(labels.end(), right.begin(), right.end());
  const auto d = class_distribution(labels);
  ASSERT_EQ(d.size(), 2u);
  const std::array<std::pair<const char*, const char*>, 4> left_cells = {
      {{"37.5", "7.7"}, {"34.9", "7.6"}, {"10.5", "4.9"}, {"17.1", "6.0"}}};
  const std::array<std::pair<const char*, const char*>, 4> right_cells = {
      {{"13.2", "7.6"}, {"21.1", "9.2"}, {"44.7", "11.2"}, {"21.1", "9.2"}}};
  for (size_t k = 0; k < 4; ++k) {
    EXPECT_EQ(rounded(d[0].shares[k].percent), left_cells[k].first);
    EXPECT_EQ(rounded(d[0].shares[k].ci_half_width), left_cells[k].second);
    EXPECT_EQ(rounded(d[1].shares[k].percent), right_cells[k].first);
    EXPECT_EQ(rounded(d[1].shares[k].ci_half_width), right_cells[k].second);
  }
}

TEST(ClassDistribution, ThreeOfEightStableLeft) {
  const auto d = class_distribution(counts(Group::LeftLeaning, {3, 3, 1, 1}));
  ASSERT_EQ(d.size(), 1u);
  EXPECT_DOUBLE_EQ(d[0].shares[0].percent, 37.5);
  EXPECT_EQ(d[0].n, 8);
}

TEST(ClassDistribution, AbstainedInstancesAreExcluded) {
  auto labels = counts(Group::RightLeaning, {1, 1, 1, 1});
  labels.push_back({Group::RightLeaning, std::nullopt});
  const auto d = class_distribution(labels);
  EXPECT_EQ(d[0].n, 4);
  EXPECT_EQ(d[0].n_abstained, 1);
  EXPECT_DOUBLE_EQ(d[0].shares[2].percent, 25.0);
}

TEST(ClassDistribution, EmptyGroupIsOmittedWithWarning) {
  std::vector<std::string> warnings;
  const auto d = class_distribution(counts(Group::RightLeaning, {0, 0, 2, 0}), CiMethod::Normal, &warnings);
  ASSERT_EQ(d.size(), 1u);
  EXPECT_EQ(d[0].group, Group::RightLeaning);
  ASSERT_EQ(warnings.size(), 1u);
  EXPECT_NE(warnings[0].find("Left-leaning"), std::string::npos);
}

TEST(Typology, LabelJsonRoundTrip) {
  const auto l = *classify(R, L, R, L);
  const auto back = typology_label_from_json(to_json(l));
  EXPECT_EQ(back.value, l.value);
  EXPECT_EQ(back.delta, l.delta);
  EXPECT_EQ(back.o, l.o);
  EXPECT_EQ(back.a_support, l.a_support);
}

}  // namespace
}  // namespace press::typology
