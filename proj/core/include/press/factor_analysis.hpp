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

// Principal-component factor extraction with Kaiser retention and varimax
// rotation, for checking that a statement set measures one dominant axis.

#ifndef PRESS_FACTOR_ANALYSIS_HPP_
#define PRESS_FACTOR_ANALYSIS_HPP_

#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <Eigen/Dense>

#include "press/common.hpp"
#include "press/util.hpp"

namespace press::fa {

struct ResponseMatrix {
  std::vector<std::string> items;  // column names
  Eigen::MatrixXd values;          // observations x items
  int dropped_rows = 0;

  // Throws ValidationError: column count mismatch, fewer than 2 distinct rows.
  void validate() const;
};

// Rows with any missing (abstained) entry are dropped and counted.
ResponseMatrix build_response_matrix(std::vector<std::string> items,
                                     const std::vector<std::vector<std::optional<double>>>& rows);

// CSV with a header of item names and one observation per row. Empty, "NA"
// and "null" cells are missing; other cells must be numbers (ParseError).
ResponseMatrix read_response_csv(std::string_view text);

// Pearson correlation of columns. Throws ValidationError naming a
// zero-variance item.
Eigen::MatrixXd correlation_matrix(const ResponseMatrix& m);

struct Extraction {
  Eigen::VectorXd eigenvalues;  // descending
  Eigen::MatrixXd loadings;     // items x items, column k = v_k * sqrt(lambda_k)
  int retained = 0;             // eigenvalues strictly greater than 1
  std::vector<std::string> warnings;
};

Extraction extract_factors(const ResponseMatrix& m);
Extraction extract_factors_from_correlation(const Eigen::MatrixXd& correlation);

struct VarimaxOptions {
  int max_iter = 1000;
  double tol = 1e-10;
  bool kaiser_normalize = true;
};

struct VarimaxResult {
  Eigen::MatrixXd rotated;
  Eigen::MatrixXd rotation;  // loadings * rotation == rotated
  std::vector<double> criterion_history;
  int iterations = 0;
};

class VarimaxNonConvergence : public NumericError {
 public:
  VarimaxNonConvergence(const std::string& what, VarimaxResult last)
      : NumericError(what), last_(std::move(last)) {}
  const VarimaxResult& last_iterate() const { return last_; }

 private:
  VarimaxResult last_;
};

// Raw varimax criterion sum_j [ p sum_i l_ij^4 - (sum_i l_ij^2)^2 ] / p^2.
double varimax_criterion(const Eigen::MatrixXd& loadings);

// Pairwise planar rotations until a full sweep improves the criterion by
// less than tol. Columns are returned in input order; one column comes back
// unchanged with an identity rotation.
VarimaxResult varimax(const Eigen::MatrixXd& loadings, const VarimaxOptions& options = {});

struct FactorSolution {
  std::vector<std::string> items;
  Eigen::VectorXd eigenvalues;
  Eigen::MatrixXd unrotated;  // items x k
  Eigen::MatrixXd rotated;    // items x k, ordered by explained variance
  Eigen::MatrixXd rotation;
  Eigen::VectorXd uniqueness;
  Eigen::VectorXd rotated_variance;  // column sums of squared rotated loadings
  int dropped_rows = 0;
  std::vector<std::string> warnings;
};

// Extraction, then varimax on the retained factors (at least one factor is
// kept so the report is never empty). Rotated factors are sorted by
// explained variance and signed so each column sums non-negative.
FactorSolution solve(const ResponseMatrix& m, const VarimaxOptions& options = {});

struct FaReport {
  csv::Row eigen_header;
  std::vector<csv::Row> eigen_rows;      // Factor, Eigenvalue, Proportion, Cumulative
  csv::Row variance_header;
  std::vector<csv::Row> variance_rows;   // rotated SS loadings
  csv::Row loadings_header;
  std::vector<csv::Row> loadings_rows;   // Variable, Factor 1..k, Uniqueness

  std::string eigen_csv() const;
  std::string variance_csv() const;
  std::string loadings_csv() const;
};

// Proportions are over total variance (the item count).
FaReport fa_report(const FactorSolution& solution);

}  // namespace press::fa

#endif  // PRESS_FACTOR_ANALYSIS_HPP_
