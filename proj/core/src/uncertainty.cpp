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

#include "press/uncertainty.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include <fmt/format.h>

#include "press/stance_judge.hpp"

namespace press::uncertainty {

bool SampleSet::has_logprobs() const {
  return !completions.empty() &&
         std::all_of(completions.begin(), completions.end(), [](const llm::Completion& c) {
           return c.token_logprobs.has_value() && !c.token_logprobs->empty();
         });
}

std::vector<int> SemanticClustering::cluster_sizes() const {
  std::vector<int> sizes(representatives.size(), 0);
  for (int c : assignment) ++sizes.at(static_cast<size_t>(c));
  return sizes;
}

SemanticClustering cluster_semantic(const SampleSet& samples, judge::NliClassifier& nli,
                                    const std::string& context) {
  if (samples.size() == 0) throw ContractViolation("cannot cluster an empty sample set");
  auto with_context = [&](const std::string& text) {
    return context.empty() ? text : context + "\n" + text;
  };
  SemanticClustering out;
  out.assignment.assign(samples.size(), -1);
  for (size_t i = 0; i < samples.size(); ++i) {
    const std::string candidate = with_context(samples.completions[i].text);
    for (int c = 0; c < out.cluster_count(); ++c) {
      const std::string rep = with_context(samples.completions[static_cast<size_t>(out.representatives[c])].text);
      if (judge::nli_entails(candidate, rep, nli) && judge::nli_entails(rep, candidate, nli)) {
        out.assignment[i] = c;
        break;
      }
    }
    if (out.assignment[i] < 0) {
      out.assignment[i] = out.cluster_count();
      out.representatives.push_back(static_cast<int>(i));
    }
  }
  return out;
}

namespace {

std::vector<double> sequence_logprobs(const SampleSet& samples, bool length_normalized) {
  if (samples.size() == 0) throw ContractViolation("empty sample set");
  std::vector<double> out;
  out.reserve(samples.size());
  for (size_t i = 0; i < samples.size(); ++i) {
    const auto& c = samples.completions[i];
    const auto lp = length_normalized ? c.mean_logprob() : c.total_logprob();
    if (!lp) throw CapabilityError(fmt::format("sample {} of '{}' has no token logprobs", i, samples.prompt_id));
    out.push_back(*lp);
  }
  return out;
}

}  // namespace

double predictive_entropy(const SampleSet& samples, bool length_normalized) {
  const auto lps = sequence_logprobs(samples, length_normalized);
  return -std::accumulate(lps.begin(), lps.end(), 0.0) / static_cast<double>(lps.size());
}

double shannon_entropy(std::span<const double> probabilities) {
  double h = 0.0;
  for (double p : probabilities) {
    if (p > 0.0) h -= p * std::log(p);
  }
  return h;
}

double semantic_entropy(const SampleSet& samples, const SemanticClustering& clustering) {
  if (clustering.assignment.size() != samples.size()) {
    throw ContractViolation("clustering does not cover the sample set");
  }
  const auto lps = sequence_logprobs(samples, true);
  // Shift by the max log-probability before exponentiating.
  const double shift = *std::max_element(lps.begin(), lps.end());
  std::vector<double> mass(static_cast<size_t>(clustering.cluster_count()), 0.0);
  for (size_t i = 0; i < lps.size(); ++i) {
    mass.at(static_cast<size_t>(clustering.assignment[i])) += std::exp(lps[i] - shift);
  }
  const double total = std::accumulate(mass.begin(), mass.end(), 0.0);
  for (double& m : mass) m /= total;
  return shannon_entropy(mass);
}

double discrete_semantic_entropy(std::span<const int> cluster_sizes) {
  const double n = std::accumulate(cluster_sizes.begin(), cluster_sizes.end(), 0.0);
  if (n <= 0.0) throw ContractViolation("clustering is empty");
  std::vector<double> p;
  p.reserve(cluster_sizes.size());
  for (int s : cluster_sizes) p.push_back(s / n);
  return shannon_entropy(p);
}

double discrete_semantic_entropy(const SemanticClustering& clustering) {
  const auto sizes = clustering.cluster_sizes();
  return discrete_semantic_entropy(std::span<const int>(sizes));
}

UncertaintyScores score(const SampleSet& samples, const SemanticClustering& clustering) {
  UncertaintyScores s;
  s.n_samples = static_cast<int>(samples.size());
  s.n_clusters = clustering.cluster_count();
  s.dse = discrete_semantic_entropy(clustering);
  if (samples.has_logprobs()) {
    s.pe = predictive_entropy(samples, true);
    s.pe_sequence = predictive_entropy(samples, false);
    s.se = semantic_entropy(samples, clustering);
  } else {
    s.degraded = true;
  }
  return s;
}

double auroc(std::span<const double> scores, const std::vector<bool>& positive) {
  if (scores.size() != positive.size()) throw ContractViolation("scores and labels differ in length");
  const size_t n = scores.size();
  for (double s : scores) {
    if (!std::isfinite(s)) throw ContractViolation("AUROC scores must be finite");
  }
  std::vector<size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(), [&](size_t a, size_t b) { return scores[a] < scores[b]; });

  // Sum of (1-based, tie-averaged) ranks of the positives.
  double rank_sum = 0.0;
  size_t n_pos = 0;
  for (size_t i = 0; i < n;) {
    size_t j = i;
    while (j < n && scores[order[j]] == scores[order[i]]) ++j;
    const double avg_rank = (static_cast<double>(i + 1) + static_cast<double>(j)) / 2.0;
    for (size_t k = i; k < j; ++k) {
      if (positive[order[k]]) {
        rank_sum += avg_rank;
        ++n_pos;
      }
    }
    i = j;
  }
  const size_t n_neg = n - n_pos;
  if (n_pos == 0 || n_neg == 0) {
    throw UndefinedAurocError(fmt::format("AUROC needs both classes (positives {}, negatives {})", n_pos, n_neg));
  }
  const double np = static_cast<double>(n_pos);
  const double u = rank_sum - np * (np + 1.0) / 2.0;
  return u / (np * static_cast<double>(n_neg));
}

nlohmann::json to_json(const UncertaintyScores& s) {
  auto opt = [](const std::optional<double>& v) { return v ? nlohmann::json(*v) : nlohmann::json(nullptr); };
  return {{"pe", opt(s.pe)},         {"pe_sequence", opt(s.pe_sequence)}, {"se", opt(s.se)},
          {"dse", s.dse},            {"degraded", s.degraded},            {"n_clusters", s.n_clusters},
          {"n_samples", s.n_samples}};
}

UncertaintyScores scores_from_json(const nlohmann::json& j) {
  auto opt = [&](const char* k) -> std::optional<double> {
    if (!j.contains(k) || j[k].is_null()) return std::nullopt;
    return j[k].get<double>();
  };
  UncertaintyScores s;
  s.pe = opt("pe");
  s.pe_sequence = opt("pe_sequence");
  s.se = opt("se");
  s.dse = j.at("dse").get<double>();
  s.degraded = j.at("degraded").get<bool>();
  s.n_clusters = j.at("n_clusters").get<int>();
  s.n_samples = j.at("n_samples").get<int>();
  return s;
}

nlohmann::json to_json(const SemanticClustering& c) {
  return {{"assignment", c.assignment}, {"representatives", c.representatives}};
}

}  // namespace press::uncertainty
