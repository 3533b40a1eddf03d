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

// Shared helpers for the unit, integration and acceptance tests.

#ifndef PRESS_TESTS_SUPPORT_PRESS_TESTING_HPP_
#define PRESS_TESTS_SUPPORT_PRESS_TESTING_HPP_

#include <array>
#include <atomic>
#include <deque>
#include <filesystem>
#include <map>
#include <mutex>
#include <string>
#include <tuple>
#include <vector>

#include <Eigen/Dense>

#include "press/config.hpp"
#include "press/corpus.hpp"
#include "press/gateway.hpp"
#include "press/reversal.hpp"
#include "press/typology.hpp"

namespace press::testing {

class TempDir {
 public:
  explicit TempDir(const std::string& tag = "press");
  ~TempDir();
  TempDir(const TempDir&) = delete;
  TempDir& operator=(const TempDir&) = delete;
  const std::filesystem::path& path() const { return path_; }
  std::filesystem::path operator/(const std::string& name) const { return path_ / name; }

 private:
  std::filesystem::path path_;
};

// Relative path -> contents for every artifact in an output directory except
// the request log, which carries timestamps.
std::map<std::string, std::string> read_bundle(const std::filesystem::path& dir);

// Backend with scripted failures. Each send() pops the next status from
// `failures` (0 = connection error) and throws; once empty, it answers with
// "reply <seed>" texts.
class FakeBackend : public llm::Backend {
 public:
  explicit FakeBackend(llm::Capabilities caps = {true, true, true}, std::string id = "fake");
  std::string id() const override { return id_; }
  llm::Capabilities capabilities() override { return caps_; }
  std::vector<llm::Completion> send(const llm::CompletionRequest& request) override;

  void fail_with(std::vector<int> statuses);
  int sends() const { return sends_.load(); }
  std::vector<llm::CompletionRequest> requests() const;

 private:
  llm::Capabilities caps_;
  std::string id_;
  mutable std::mutex mu_;
  std::deque<int> failures_;
  std::vector<llm::CompletionRequest> requests_;
  std::atomic<int> sends_{0};
};

// Argument sets whose text the scripted agents recognise; variant v uses
// generator seed v, so the three variants have distinct wording.
std::vector<corpus::ArgumentSet> scripted_argument_sets(const std::vector<corpus::Statement>& statements,
                                                        int variants);
void write_arguments_file(const std::filesystem::path& path, const std::vector<corpus::Statement>& statements,
                          int variants);

using CellKey = std::tuple<std::string, std::string, std::string>;  // model, topic, persona

// Four scripted agents (two per ideology) whose per-topic, per-variant
// typology labels are fixed in advance.
struct PlantedScenario {
  runner::RunConfig config;
  std::vector<corpus::Statement> statements;
  std::map<CellKey, std::vector<typology::Label>> labels;  // variant order
  // Expected outcomes, keyed by (model or pair name, topic, family).
  std::map<CellKey, reversal::Outcome> outcomes;
};

PlantedScenario planted_scenario(const std::filesystem::path& out_dir, uint64_t seed);

// Agents whose unstable topics draw from strictly larger response pools, with
// a scripted NLI that knows which responses share a meaning.
struct PoolScenario {
  runner::RunConfig config;
  std::map<std::pair<std::string, std::string>, bool> unstable;  // (model, topic)
};

PoolScenario pool_scenario(const std::filesystem::path& out_dir, uint64_t seed);

// +-1 responses driven by independent binary latent signs: item j copies the
// sign of latent factor_of_item[j] with probability q and flips it otherwise,
// so items on the same factor correlate at (2q-1)^2 and load at 2q-1.
Eigen::MatrixXd binary_factor_data(int rows, const std::vector<int>& factor_of_item, double q, uint64_t seed);

}  // namespace press::testing

#endif  // PRESS_TESTS_SUPPORT_PRESS_TESTING_HPP_
