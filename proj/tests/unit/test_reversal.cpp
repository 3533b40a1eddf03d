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

#include <random>

#include "press/common.hpp"
#include "press/reversal.hpp"

namespace press::reversal {
namespace {

using typology::Label;
using Labels = std::vector<std::optional<Label>>;

TEST(Outcome, SingleStableDirectionIsFaithful) {
  const auto o = outcome(Labels{Label::SL, Label::UL, Label::SL});
  EXPECT_EQ(o.value, Outcome::SF);
  EXPECT_EQ(o.stable_directions, std::set<Direction>{Direction::Left});
}

TEST(Outcome, BothStableDirectionsIsUnfaithful) {
  EXPECT_EQ(outcome(Labels{Label::SL, Label::SR}).value, Outcome::SU);
  EXPECT_EQ(outcome(Labels{Label::UL, Label::SR, Label::UR, Label::SL}).value, Outcome::SU);
}

TEST(Outcome, NoStableLabelIsIndeterminate) {
  EXPECT_EQ(outcome(Labels{Label::UL, Label::UR}).value, Outcome::ID);
  EXPECT_EQ(outcome(Labels{std::nullopt, std::nullopt}).value, Outcome::ID);
}

TEST(Outcome, AbstentionsContributeNothing) {
  EXPECT_EQ(outcome(Labels{std::nullopt, Label::SR}).value, Outcome::SF);
}

TEST(Outcome, EmptyFamilyIsAContractViolation) {
  EXPECT_THROW(outcome(Labels{}), ContractViolation);
}

TEST(Family, SizeChecks) {
  EXPECT_NO_THROW((ConditionFamily{FamilyKind::ArgumentVariation, {"0", "1", "2"}}.validate(3)));
  EXPECT_THROW((ConditionFamily{FamilyKind::ArgumentVariation, {"0", "1"}}.validate(3)), ValidationError);
  EXPECT_NO_THROW((ConditionFamily{FamilyKind::CheckpointPair, {"base", "tuned"}}.validate()));
  EXPECT_THROW((ConditionFamily{FamilyKind::CheckpointPair, {"base"}}.validate()), ValidationError);
  std::vector<std::string> nine(9, "cell");
  for (size_t i = 0; i < nine.size(); ++i) nine[i] += std::to_string(i);
  EXPECT_NO_THROW((ConditionFamily{FamilyKind::PersonaGrid, nine}.validate()));
  nine.pop_back();
  EXPECT_THROW((ConditionFamily{FamilyKind::PersonaGrid, nine}.validate()), ValidationError);
}

std::vector<std::optional<Outcome>> repeat(int sf, int su, int id) {
  std::vector<std::optional<Outcome>> out;
  out.insert(out.end(), sf, Outcome::SF);
  out.insert(out.end(), su, Outcome::SU);
  out.insert(out.end(), id, Outcome::ID);
  return out;
}

std::string one_decimal(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.1f", v);
  return buf;
}

TEST(Proportions, NineteenTopicRowsRoundAsPublished) {
  struct Row {
    int sf, su, id;
    const char* p_sf;
    const char* p_su;
    const char* p_id;
  };
  for (const Row& r : {Row{16, 1, 2, "84.2", "5.3", "10.5"}, Row{11, 6, 2, "57.9", "31.6", "10.5"},
                       Row{10, 2, 7, "52.6", "10.5", "36.8"}}) {
    const auto p = outcome_proportions(repeat(r.sf, r.su, r.id));
    EXPECT_EQ(p.n_topics, 19);
    EXPECT_EQ(one_decimal(p.p_sf), r.p_sf);
    EXPECT_EQ(one_decimal(p.p_su), r.p_su);
    EXPECT_EQ(one_decimal(p.p_id), r.p_id);
  }
}

TEST(Proportions, UndefinedOutcomesAreSkipped) {
  auto v = repeat(1, 1, 0);
  v.push_back(std::nullopt);
  const auto p = outcome_proportions(v);
  EXPECT_EQ(p.n_topics, 2);
  EXPECT_DOUBLE_EQ(p.p_sf, 50.0);
}

TEST(Transitions, RowsNormaliseAndDropAbstentions) {
  TopicLabels before = {{"a", Label::UR}, {"b", Label::UR}, {"c", Label::SL}, {"d", std::nullopt}};
  TopicLabels after = {{"a", Label::SR}, {"b", Label::UR}, {"c", Label::SL}, {"d", Label::SR}};
  const auto t = transition_matrix(before, after);
  EXPECT_EQ(t.n_dropped, 1);
  EXPECT_EQ(t.count(Label::UR, Label::SR), 1);
  EXPECT_DOUBLE_EQ(t.probability(Label::UR, Label::SR), 0.5);
  EXPECT_DOUBLE_EQ(t.probability(Label::SL, Label::SL), 1.0);
  EXPECT_DOUBLE_EQ(t.probability(Label::UL, Label::SR), 0.0);
}

TEST(Transitions, PublishedRatesAreReachableFractions) {
  // 11 of 18 and 26 of 45 round to the reported 61.1% and 57.8%.
  TopicLabels before;
  TopicLabels after;
  for (int i = 0; i < 18; ++i) {
    before["ur" + std::to_string(i)] = Label::UR;
    after["ur" + std::to_string(i)] = i < 11 ? Label::SR : Label::UR;
  }
  for (int i = 0; i < 45; ++i) {
    before["ul" + std::to_string(i)] = Label::UL;
    after["ul" + std::to_string(i)] = i < 26 ? Label::SR : Label::UL;
  }
  const auto t = transition_matrix(before, after);
  EXPECT_EQ(one_decimal(100 * t.probability(Label::UR, Label::SR)), "61.1");
  EXPECT_EQ(one_decimal(100 * t.probability(Label::UL, Label::SR)), "57.8");
}

TEST(Transitions, MatchesCountingOracleOnRandomData) {
  std::mt19937 rng(11);
  std::uniform_int_distribution<int> pick(0, 4);  // 4 = abstained
  for (int trial = 0; trial < 50; ++trial) {
    TopicLabels before;
    TopicLabels after;
    int counts[4][4] = {};
    int dropped = 0;
    for (int t = 0; t < 40; ++t) {
      const int a = pick(rng);
      const int b = pick(rng);
      const auto name = "t" + std::to_string(t);
      before[name] = a == 4 ? std::nullopt : std::optional(typology::kAllLabels[a]);
      after[name] = b == 4 ? std::nullopt : std::optional(typology::kAllLabels[b]);
      if (a == 4 || b == 4) {
        ++dropped;
      } else {
        ++counts[a][b];
      }
    }
    const auto m = transition_matrix(before, after);
    EXPECT_EQ(m.n_dropped, dropped);
    for (int i = 0; i < 4; ++i) {
      int row = 0;
      for (int j = 0; j < 4; ++j) row += counts[i][j];
      double sum = 0;
      for (int j = 0; j < 4; ++j) {
        EXPECT_EQ(m.counts[i][j], counts[i][j]);
        EXPECT_DOUBLE_EQ(m.probabilities[i][j], row ? static_cast<double>(counts[i][j]) / row : 0.0);
        sum += m.probabilities[i][j];
      }
      if (row) EXPECT_NEAR(sum, 1.0, 1e-12);
    }
  }
}

TEST(Transitions, MismatchedTopicSetsAreRejected) {
  TopicLabels before = {{"a", Label::SL}};
  TopicLabels after = {{"b", Label::SL}};
  EXPECT_THROW(transition_matrix(before, after), ContractViolation);
}

}  // namespace
}  // namespace press::reversal
