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
#include <numbers>
#include <random>

#include "press/common.hpp"
#include "press/factor_analysis.hpp"
#include "press_testing.hpp"

namespace press::fa {
namespace {

ResponseMatrix matrix_of(const Eigen::MatrixXd& x) {
  ResponseMatrix m;
  for (Eigen::Index j = 0; j < x.cols(); ++j) m.items.push_back("Q" + std::to_string(j + 1));
  m.values = x;
  return m;
}

double pearson(const Eigen::VectorXd& a, const Eigen::VectorXd& b) {
  const double n = static_cast<double>(a.size());
  const double ma = a.sum() / n;
  const double mb = b.sum() / n;
  double sab = 0, saa = 0, sbb = 0;
  for (Eigen::Index i = 0; i < a.size(); ++i) {
    sab += (a(i) - ma) * (b(i) - mb);
    saa += (a(i) - ma) * (a(i) - ma);
    sbb += (b(i) - mb) * (b(i) - mb);
  }
  return sab / std::sqrt(saa * sbb);
}

TEST(Correlation, MatchesPairwisePearson) {
  const auto x = testing::binary_factor_data(60, {0, 0, 1, 1, 0}, 0.8, 3);
  const auto r = correlation_matrix(matrix_of(x));
  for (Eigen::Index i = 0; i < x.cols(); ++i) {
    for (Eigen::Index j = 0; j < x.cols(); ++j) {
      EXPECT_NEAR(r(i, j), pearson(x.col(i), x.col(j)), 1e-12);
    }
  }
}

TEST(Correlation, ConstantItemIsNamed) {
  Eigen::MatrixXd x(4, 3);
  x << 1, 1, -1, -1, 1, 1, 1, 1, -1, -1, 1, 1;
  auto m = matrix_of(x);
  m.items = {"alpha", "beta", "gamma"};
  try {
    correlation_matrix(m);
    FAIL() << "expected ValidationError";
  } catch (const ValidationError& e) {
    EXPECT_NE(std::string(e.what()).find("beta"), std::string::npos);
  }
}

TEST(ResponseMatrixBuild, DropsRowsWithMissingEntries) {
  const std::vector<std::vector<std::optional<double>>> rows = {
      {1.0, -1.0}, {std::nullopt, 1.0}, {-1.0, 1.0}, {1.0, 1.0}};
  const auto m = build_response_matrix({"a", "b"}, rows);
  EXPECT_EQ(m.values.rows(), 3);
  EXPECT_EQ(m.dropped_rows, 1);
}

TEST(ResponseMatrixBuild, NeedsTwoDistinctRows) {
  const std::vector<std::vector<std::optional<double>>> rows = {{1.0, -1.0}, {1.0, -1.0}};
  EXPECT_THROW(build_response_matrix({"a", "b"}, rows).validate(), ValidationError);
  EXPECT_THROW(build_response_matrix({"a", "b", "c"}, rows), ValidationError);
}

TEST(Extraction, EigenStructureInvariants) {
  const auto x = testing::binary_factor_data(200, {0, 0, 0, 1, 1, 1, 0, 1}, 0.85, 8);
  const auto m = matrix_of(x);
  const auto ex = extract_factors(m);
  const auto r = correlation_matrix(m);
  EXPECT_NEAR(ex.eigenvalues.sum(), static_cast<double>(x.cols()), 1e-9);
  for (Eigen::Index k = 1; k < ex.eigenvalues.size(); ++k) EXPECT_GE(ex.eigenvalues(k - 1), ex.eigenvalues(k));
  for (Eigen::Index k = 0; k < ex.loadings.cols(); ++k) EXPECT_GE(ex.loadings.col(k).sum(), -1e-12);
  EXPECT_LT((ex.loadings * ex.loadings.transpose() - r).cwiseAbs().maxCoeff(), 1e-9);
  int above = 0;
  for (Eigen::Index k = 0; k < ex.eigenvalues.size(); ++k) above += ex.eigenvalues(k) > 1.0;
  EXPECT_EQ(ex.retained, above);
  EXPECT_EQ(ex.retained, 2);
}

TEST(Extraction, UnidimensionalDataHasDominantFirstFactor) {
  const auto x = testing::binary_factor_data(240, std::vector<int>(19, 0), 0.9, 2024);
  const auto ex = extract_factors(matrix_of(x));
  EXPECT_GE(ex.eigenvalues(0) / 19.0, 0.60);
  EXPECT_EQ(ex.retained, 1);
  for (Eigen::Index i = 0; i < 19; ++i) EXPECT_NEAR(ex.loadings(i, 0), 0.8, 0.1);
}

Eigen::MatrixXd random_loadings(int p, int k, unsigned seed) {
  std::mt19937 rng(seed);
  std::normal_distribution<double> n(0.0, 0.5);
  Eigen::MatrixXd l(p, k);
  for (int i = 0; i < p; ++i) {
    for (int j = 0; j < k; ++j) l(i, j) = n(rng);
  }
  return l;
}

TEST(Varimax, OrthogonalAndCommunalityPreserving) {
  for (unsigned seed : {1u, 2u, 3u}) {
    for (bool kaiser : {true, false}) {
      const auto l = random_loadings(12, 3, seed);
      const auto r = varimax(l, {1000, 1e-10, kaiser});
      const Eigen::MatrixXd eye = Eigen::MatrixXd::Identity(3, 3);
      EXPECT_LT((r.rotation.transpose() * r.rotation - eye).cwiseAbs().maxCoeff(), 1e-9);
      EXPECT_LT((l * r.rotation - r.rotated).cwiseAbs().maxCoeff(), 1e-12);
      EXPECT_LT((l.rowwise().squaredNorm() - r.rotated.rowwise().squaredNorm()).cwiseAbs().maxCoeff(), 1e-9);
      for (size_t i = 1; i < r.criterion_history.size(); ++i) {
        EXPECT_GE(r.criterion_history[i], r.criterion_history[i - 1] - 1e-15);
      }
    }
  }
}

// At convergence no small planar rotation improves the criterion.
TEST(Varimax, ConvergedSolutionIsLocallyOptimal) {
  const auto l = random_loadings(15, 3, 9);
  const auto r = varimax(l, {1000, 1e-14, false});
  const double best = varimax_criterion(r.rotated);
  for (int a = 0; a < 3; ++a) {
    for (int b = a + 1; b < 3; ++b) {
      for (double phi : {-1e-3, 1e-3, -5e-2, 5e-2}) {
        Eigen::MatrixXd g = Eigen::MatrixXd::Identity(3, 3);
        g(a, a) = g(b, b) = std::cos(phi);
        g(a, b) = -std::sin(phi);
        g(b, a) = std::sin(phi);
        EXPECT_LE(varimax_criterion(r.rotated * g), best + 1e-12);
      }
    }
  }
}

TEST(Varimax, RecoversPlantedRotationOfSimpleStructure) {
  Eigen::MatrixXd simple = Eigen::MatrixXd::Zero(8, 2);
  simple.block(0, 0, 4, 1).setConstant(0.8);
  simple.block(4, 1, 4, 1).setConstant(0.7);
  const double phi = std::numbers::pi / 7;
  Eigen::Matrix2d rot;
  rot << std::cos(phi), -std::sin(phi), std::sin(phi), std::cos(phi);
  const auto r = varimax(simple * rot);
  // Up to column sign and order.
  for (Eigen::Index i = 0; i < 8; ++i) {
    const double big = std::max(std::abs(r.rotated(i, 0)), std::abs(r.rotated(i, 1)));
    const double small = std::min(std::abs(r.rotated(i, 0)), std::abs(r.rotated(i, 1)));
    EXPECT_NEAR(big, i < 4 ? 0.8 : 0.7, 1e-6);
    EXPECT_NEAR(small, 0.0, 1e-6);
  }
}

TEST(Varimax, SingleColumnIsUnchanged) {
  const auto l = random_loadings(5, 1, 4);
  const auto r = varimax(l);
  EXPECT_EQ(r.rotated, l);
  EXPECT_EQ(r.rotation, Eigen::MatrixXd::Identity(1, 1));
}

TEST(Varimax, NonConvergenceCarriesLastIterate) {
  const auto l = random_loadings(10, 3, 12);
  try {
    varimax(l, {1, 0.0, true});
    FAIL() << "expected VarimaxNonConvergence";
  } catch (const VarimaxNonConvergence& e) {
    EXPECT_EQ(e.last_iterate().iterations, 1);
    EXPECT_LT((l * e.last_iterate().rotation - e.last_iterate().rotated).cwiseAbs().maxCoeff(), 1e-12);
  }
}

TEST(Solve, TwoFactorSimpleStructureRecovered) {
  std::vector<int> blocks(19, 0);
  for (int j = 10; j < 19; ++j) blocks[static_cast<size_t>(j)] = 1;
  const auto x = testing::binary_factor_data(240, blocks, 0.9, 77);
  const auto sol = solve(matrix_of(x));
  ASSERT_EQ(sol.rotated.cols(), 2);
  // Match columns to blocks by which block loads more on them.
  const int col_for_block0 = sol.rotated.block(0, 0, 10, 1).cwiseAbs().sum() >
                                     sol.rotated.block(0, 1, 10, 1).cwiseAbs().sum()
                                 ? 0
                                 : 1;
  for (int j = 0; j < 19; ++j) {
    const int own = blocks[static_cast<size_t>(j)] == 0 ? col_for_block0 : 1 - col_for_block0;
    EXPECT_NEAR(std::abs(sol.rotated(j, own)), 0.8, 0.1) << "item " << j;
    EXPECT_NEAR(sol.rotated(j, 1 - own), 0.0, 0.1) << "item " << j;
  }
  EXPECT_GE(sol.rotated_variance(0), sol.rotated_variance(1));
  for (Eigen::Index k = 0; k < 2; ++k) EXPECT_GE(sol.rotated.col(k).sum(), 0.0);
  EXPECT_LT((sol.uniqueness.array() - (1.0 - sol.unrotated.rowwise().squaredNorm().array())).abs().maxCoeff(),
            1e-9);
}

TEST(Report, ProportionsAreOverTotalVariance) {
  FactorSolution s;
  s.items = {"a", "b", "c", "d"};
  s.eigenvalues = Eigen::Vector4d(2.0, 1.2, 0.5, 0.3);
  s.rotated = Eigen::MatrixXd(4, 2);
  s.rotated << 0.9, 0.0, 0.8, -0.00001, 0.1, 0.7, 0.0, 0.6;
  s.rotated_variance = s.rotated.colwise().squaredNorm().transpose();
  s.uniqueness = Eigen::VectorXd::Ones(4) - s.rotated.rowwise().squaredNorm();
  const auto r = fa_report(s);
  EXPECT_EQ(r.eigen_csv(),
            "Factor,Eigenvalue,Proportion,Cumulative\n"
            "Factor 1,2.0000,0.5000,0.5000\n"
            "Factor 2,1.2000,0.3000,0.8000\n"
            "Factor 3,0.5000,0.1250,0.9250\n"
            "Factor 4,0.3000,0.0750,1.0000\n");
  EXPECT_EQ(r.loadings_rows[1], (csv::Row{"b", "0.8000", "0.0000", "0.3600"}));
  EXPECT_EQ(r.variance_rows.size(), 2u);
  EXPECT_EQ(r.variance_rows[0][1], "1.4600");
  EXPECT_EQ(r.loadings_header, (csv::Row{"Variable", "Factor 1", "Factor 2", "Uniqueness"}));
}

TEST(Report, TablesRoundTripThroughCsv) {
  const auto x = testing::binary_factor_data(240, {0, 0, 0, 0, 1, 1, 1, 1}, 0.9, 42);
  const auto r = fa_report(solve(matrix_of(x)));
  for (const auto& text : {r.eigen_csv(), r.variance_csv(), r.loadings_csv()}) {
    EXPECT_EQ(csv::format(csv::parse(text)), text);
  }
}

TEST(ResponseCsv, MissingCellsDropRows) {
  const auto m = read_response_csv("a,b\n1,-1\nNA,1\n-1,1\n0.5,\n");
  EXPECT_EQ(m.items, (std::vector<std::string>{"a", "b"}));
  ASSERT_EQ(m.values.rows(), 2);
  EXPECT_EQ(m.dropped_rows, 2);
  EXPECT_DOUBLE_EQ(m.values(1, 0), -1.0);
  EXPECT_DOUBLE_EQ(m.values(0, 1), -1.0);
}

TEST(ResponseCsv, RejectsBadCells) {
  EXPECT_THROW(read_response_csv("a,b\n1,x\n"), ParseError);
  EXPECT_THROW(read_response_csv("a,b\n1,inf\n"), ParseError);
  EXPECT_ANY_THROW(read_response_csv("a,b\n1\n"));
  EXPECT_ANY_THROW(read_response_csv(""));
}

}  // namespace
}  // namespace press::fa
