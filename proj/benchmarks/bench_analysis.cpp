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

#include <random>
#include <vector>

#include <benchmark/benchmark.h>
#include <Eigen/Dense>
#include <fmt/format.h>

#include "press/factor_analysis.hpp"
#include "press/nli.hpp"
#include "press/typology.hpp"
#include "press/uncertainty.hpp"

namespace {

using namespace press;

void BM_Auroc(benchmark::State& state) {
  const auto n = static_cast<size_t>(state.range(0));
  std::mt19937_64 rng(1);
  std::vector<double> scores(n);
  std::vector<bool> positive(n);
  for (size_t i = 0; i < n; ++i) {
    scores[i] = std::uniform_int_distribution<int>(0, 50)(rng) * 0.1;
    positive[i] = i % 3 == 0;
  }
  for (auto _ : state) benchmark::DoNotOptimize(uncertainty::auroc(scores, positive));
  state.SetComplexityN(state.range(0));
}
BENCHMARK(BM_Auroc)->RangeMultiplier(4)->Range(64, 65536)->Complexity();

void BM_Varimax(benchmark::State& state) {
  const auto items = state.range(0);
  const auto factors = state.range(1);
  std::mt19937_64 rng(2);
  std::normal_distribution<double> z;
  Eigen::MatrixXd loadings(items, factors);
  for (Eigen::Index i = 0; i < loadings.size(); ++i) loadings.data()[i] = 0.4 * z(rng);
  for (auto _ : state) benchmark::DoNotOptimize(fa::varimax(loadings).rotated);
}
BENCHMARK(BM_Varimax)->Args({19, 2})->Args({19, 4})->Args({100, 8});

void BM_Solve(benchmark::State& state) {
  const auto rows = state.range(0);
  std::mt19937_64 rng(3);
  std::bernoulli_distribution coin(0.5), keep(0.9);
  fa::ResponseMatrix m;
  m.values.resize(rows, 19);
  for (int j = 0; j < 19; ++j) m.items.push_back(fmt::format("q{}", j));
  for (Eigen::Index r = 0; r < rows; ++r) {
    const double s = coin(rng) ? 1.0 : -1.0;
    for (int j = 0; j < 19; ++j) m.values(r, j) = keep(rng) ? s : -s;
  }
  for (auto _ : state) benchmark::DoNotOptimize(fa::solve(m).rotated);
}
BENCHMARK(BM_Solve)->Arg(240)->Arg(2400);

void BM_Clustering(benchmark::State& state) {
  const int samples = static_cast<int>(state.range(0));
  const int meanings = static_cast<int>(state.range(1));
  judge::ScriptedNli nli;
  for (int k = 0; k < meanings; ++k) nli.add_meaning_class({fmt::format("[m{}]", k)});
  uncertainty::SampleSet set;
  for (int i = 0; i < samples; ++i) {
    llm::Completion c;
    c.text = fmt::format("answer [m{}]", i % meanings);
    set.completions.push_back(c);
  }
  for (auto _ : state) benchmark::DoNotOptimize(uncertainty::cluster_semantic(set, nli).assignment);
}
BENCHMARK(BM_Clustering)->Args({20, 2})->Args({20, 10})->Args({100, 25});

void BM_Classify(benchmark::State& state) {
  std::vector<std::array<Direction, 4>> cases;
  for (int bits = 0; bits < 16; ++bits) {
    std::array<Direction, 4> c{};
    for (int k = 0; k < 4; ++k) c[k] = (bits >> k) & 1 ? Direction::Right : Direction::Left;
    cases.push_back(c);
  }
  for (auto _ : state) {
    for (const auto& c : cases) benchmark::DoNotOptimize(typology::classify(c[0], c[1], c[2], c[3]));
  }
  state.SetItemsProcessed(state.iterations() * static_cast<int64_t>(cases.size()));
}
BENCHMARK(BM_Classify);

}  // namespace

BENCHMARK_MAIN();
