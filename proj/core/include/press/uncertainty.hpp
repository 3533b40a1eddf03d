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

// Predictive, semantic and discrete semantic entropy over sampled responses,
// and AUROC of uncertainty scores against stability labels. All entropies are
// in nats.

#ifndef PRESS_UNCERTAINTY_HPP_
#define PRESS_UNCERTAINTY_HPP_

#include <optional>
#include <span>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "press/gateway.hpp"
#include "press/nli.hpp"

namespace press::uncertainty {

struct SampleSet {
  std::string prompt_id;
  std::vector<llm::Completion> completions;

  size_t size() const { return completions.size(); }
  bool has_logprobs() const;
};

struct SemanticClustering {
  std::vector<int> assignment;       // completion index -> cluster id
  std::vector<int> representatives;  // cluster id -> completion index

  int cluster_count() const { return static_cast<int>(representatives.size()); }
  std::vector<int> cluster_sizes() const;
};

// Greedy pass in generation order: a completion joins the first cluster
// whose representative it bidirectionally entails (with `context` prepended
// to both texts), otherwise it founds a new cluster.
SemanticClustering cluster_semantic(const SampleSet& samples, judge::NliClassifier& nli,
                                    const std::string& context = {});

// Monte Carlo estimate -(1/N) sum_i log P(y_i|x). With length_normalized the
// sequence log-probability is the mean per-token logprob, otherwise the sum.
// Throws CapabilityError when any completion lacks logprobs.
double predictive_entropy(const SampleSet& samples, bool length_normalized = true);

// Cluster masses from exp(mean token logprob), normalised over the set.
double semantic_entropy(const SampleSet& samples, const SemanticClustering& clustering);

// Frequency-based cluster proportions.
double discrete_semantic_entropy(const SemanticClustering& clustering);
double discrete_semantic_entropy(std::span<const int> cluster_sizes);

double shannon_entropy(std::span<const double> probabilities);

struct UncertaintyScores {
  std::optional<double> pe;
  std::optional<double> pe_sequence;  // unnormalised sequence log-probability
  std::optional<double> se;
  double dse = 0.0;
  bool degraded = false;
  int n_clusters = 0;
  int n_samples = 0;
};

// Computes everything available; without logprobs only DSE (degraded).
UncertaintyScores score(const SampleSet& samples, const SemanticClustering& clustering);

class UndefinedAurocError : public Error {
 public:
  using Error::Error;
};

// Rank-statistic AUROC with ties counted half. positive[i] marks Unstable
// instances, which are expected to score higher. Throws UndefinedAurocError
// when either class is empty.
double auroc(std::span<const double> scores, const std::vector<bool>& positive);

nlohmann::json to_json(const UncertaintyScores& s);
UncertaintyScores scores_from_json(const nlohmann::json& j);
nlohmann::json to_json(const SemanticClustering& c);

}  // namespace press::uncertainty

#endif  // PRESS_UNCERTAINTY_HPP_
