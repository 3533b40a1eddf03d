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

#include "press/factor_analysis.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <set>

#include <fmt/format.h>

namespace press::fa {

void ResponseMatrix::validate() const {
  if (values.cols() != static_cast<Eigen::Index>(items.size())) {
    throw ValidationError(fmt::format("response matrix has {} columns but {} item names", values.cols(), items.size()));
  }
  std::set<std::vector<double>> distinct;
  for (Eigen::Index r = 0; r < values.rows(); ++r) {
    std::vector<double> row(static_cast<size_t>(values.cols()));
    for (Eigen::Index c = 0; c < values.cols(); ++c) row[static_cast<size_t>(c)] = values(r, c);
    distinct.insert(std::move(row));
    if (distinct.size() >= 2) return;
  }
  throw ValidationError(fmt::format("response matrix needs at least 2 distinct rows (has {})", distinct.size()));
}

ResponseMatrix build_response_matrix(std::vector<std::string> items,
                                     const std::vector<std::vector<std::optional<double>>>& rows) {
  ResponseMatrix m;
  m.items = std::move(items);
  const size_t p = m.items.size();
  std::vector<const std::vector<std::optional<double>>*> kept;
  for (const auto& r : rows) {
    if (r.size() != p) throw ValidationError(fmt::format("row has {} entries, expected {}", r.size(), p));
    if (std::all_of(r.begin(), r.end(), [](const auto& v) { return v.has_value(); })) {
      kept.push_back(&r);
    } else {
      ++m.dropped_rows;
    }
  }
  m.values.resize(static_cast<Eigen::Index>(kept.size()), static_cast<Eigen::Index>(p));
  for (size_t i = 0; i < kept.size(); ++i) {
    for (size_t j = 0; j < p; ++j) m.values(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = *(*kept[i])[j];
  }
  return m;
}

ResponseMatrix read_response_csv(std::string_view text) {
  const auto table = csv::parse(text);
  if (table.empty()) throw ParseError("response table is empty");
  std::vector<std::string> items;
  for (const auto& h : table.front()) items.push_back(trim(h));
  std::vector<std::vector<std::optional<double>>> rows;
  for (size_t r = 1; r < table.size(); ++r) {
    if (table[r].size() != items.size()) {
      throw ParseError(fmt::format("row {}: expected {} fields, got {}", r + 1, items.size(), table[r].size()));
    }
    auto& row = rows.emplace_back();
    for (size_t j = 0; j < items.size(); ++j) {
      const std::string cell = trim(table[r][j]);
      if (cell.empty() || cell == "NA" || cell == "null") {
        row.emplace_back();
        continue;
      }
      size_t used = 0;
      double v = 0.0;
      try {
        v = std::stod(cell, &used);
      } catch (const std::exception&) {
        used = 0;
      }
      if (used != cell.size() || !std::isfinite(v)) {
        throw ParseError(fmt::format("row {} ('{}'): '{}' is not a number", r + 1, items[j], cell));
      }
      row.emplace_back(v);
    }
  }
  return build_response_matrix(std::move(items), rows);
}

Eigen::MatrixXd correlation_matrix(const ResponseMatrix& m) {
  m.validate();
  const Eigen::Index n = m.values.rows();
  Eigen::MatrixXd z = m.values.rowwise() - m.values.colwise().mean();
  for (Eigen::Index j = 0; j < z.cols(); ++j) {
    const double sd = std::sqrt(z.col(j).squaredNorm() / static_cast<double>(n - 1));
    if (!(sd > 1e-12)) {
      throw ValidationError(fmt::format("item '{}' has zero variance", m.items[static_cast<size_t>(j)]));
    }
    z.col(j) /= sd;
  }
  Eigen::MatrixXd r = (z.transpose() * z) / static_cast<double>(n - 1);
  // Exact unit diagonal and symmetry.
  r = (r + r.transpose()) / 2.0;
  r.diagonal().setOnes();
  return r;
}

Extraction extract_factors_from_correlation(const Eigen::MatrixXd& correlation) {
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(correlation);
  if (solver.info() != Eigen::Success) throw NumericError("eigendecomposition of the correlation matrix failed");
  const Eigen::Index p = correlation.rows();
  Extraction ex;
  ex.eigenvalues.resize(p);
  ex.loadings.resize(p, p);
  for (Eigen::Index k = 0; k < p; ++k) {
    const Eigen::Index src = p - 1 - k;  // solver sorts ascending
    const double lambda = solver.eigenvalues()(src);
    Eigen::VectorXd v = solver.eigenvectors().col(src);
    double s = v.sum();
    if (std::abs(s) < 1e-12) {
      Eigen::Index arg = 0;
      v.cwiseAbs().maxCoeff(&arg);
      s = v(arg);
    }
    if (s < 0) v = -v;
    ex.eigenvalues(k) = lambda;
    ex.loadings.col(k) = v * std::sqrt(std::max(lambda, 0.0));
    if (lambda > 1.0) ++ex.retained;
  }
  if (ex.retained == 0) ex.warnings.push_back("no eigenvalue exceeds 1; Kaiser criterion retains no factor");
  return ex;
}

Extraction extract_factors(const ResponseMatrix& m) { return extract_factors_from_correlation(correlation_matrix(m)); }

double varimax_criterion(const Eigen::MatrixXd& loadings) {
  const double p = static_cast<double>(loadings.rows());
  double v = 0.0;
  for (Eigen::Index j = 0; j < loadings.cols(); ++j) {
    const Eigen::ArrayXd sq = loadings.col(j).array().square();
    v += (p * sq.square().sum() - sq.sum() * sq.sum()) / (p * p);
  }
  return v;
}

VarimaxResult varimax(const Eigen::MatrixXd& loadings, const VarimaxOptions& options) {
  const Eigen::Index p = loadings.rows();
  const Eigen::Index k = loadings.cols();
  VarimaxResult res;
  res.rotation = Eigen::MatrixXd::Identity(k, k);
  if (k < 2) {
    res.rotated = loadings;
    res.criterion_history.push_back(varimax_criterion(loadings));
    return res;
  }

  Eigen::VectorXd h = Eigen::VectorXd::Ones(p);
  if (options.kaiser_normalize) {
    h = loadings.rowwise().norm();
    for (Eigen::Index i = 0; i < p; ++i) {
      if (h(i) < 1e-15) h(i) = 1.0;
    }
  }
  Eigen::MatrixXd work = loadings.array().colwise() / h.array();
  const double pd = static_cast<double>(p);

  res.criterion_history.push_back(varimax_criterion(work));
  while (true) {
    for (Eigen::Index a = 0; a < k - 1; ++a) {
      for (Eigen::Index b = a + 1; b < k; ++b) {
        const Eigen::ArrayXd x = work.col(a).array();
        const Eigen::ArrayXd y = work.col(b).array();
        const Eigen::ArrayXd u = x.square() - y.square();
        const Eigen::ArrayXd v = 2.0 * x * y;
        const double A = u.sum();
        const double B = v.sum();
        const double C = (u.square() - v.square()).sum();
        const double D = 2.0 * (u * v).sum();
        const double num = D - 2.0 * A * B / pd;
        const double den = C - (A * A - B * B) / pd;
        const double phi = std::atan2(num, den) / 4.0;
        if (std::abs(phi) < 1e-15) continue;
        const double c = std::cos(phi);
        const double s = std::sin(phi);
        const Eigen::VectorXd na = work.col(a) * c + work.col(b) * s;
        const Eigen::VectorXd nb = -work.col(a) * s + work.col(b) * c;
        work.col(a) = na;
        work.col(b) = nb;
        const Eigen::VectorXd ra = res.rotation.col(a) * c + res.rotation.col(b) * s;
        const Eigen::VectorXd rb = -res.rotation.col(a) * s + res.rotation.col(b) * c;
        res.rotation.col(a) = ra;
        res.rotation.col(b) = rb;
      }
    }
    ++res.iterations;
    const double crit = varimax_criterion(work);
    const double gain = crit - res.criterion_history.back();
    res.criterion_history.push_back(crit);
    if (gain < options.tol) break;
    if (res.iterations >= options.max_iter) {
      res.rotated = loadings * res.rotation;
      throw VarimaxNonConvergence(
          fmt::format("varimax did not converge in {} sweeps (last gain {:.3g})", res.iterations, gain), res);
    }
  }
  res.rotated = loadings * res.rotation;
  return res;
}

FactorSolution solve(const ResponseMatrix& m, const VarimaxOptions& options) {
  const Extraction ex = extract_factors(m);
  FactorSolution sol;
  sol.items = m.items;
  sol.eigenvalues = ex.eigenvalues;
  sol.dropped_rows = m.dropped_rows;
  sol.warnings = ex.warnings;
  const Eigen::Index k = std::max(1, ex.retained);
  sol.unrotated = ex.loadings.leftCols(k);

  const VarimaxResult vr = varimax(sol.unrotated, options);
  const Eigen::VectorXd ss = vr.rotated.colwise().squaredNorm();
  std::vector<Eigen::Index> order(static_cast<size_t>(k));
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](Eigen::Index a, Eigen::Index b) { return ss(a) > ss(b); });

  sol.rotated.resize(sol.unrotated.rows(), k);
  sol.rotation.resize(k, k);
  for (Eigen::Index j = 0; j < k; ++j) {
    const Eigen::Index src = order[static_cast<size_t>(j)];
    const double sgn = vr.rotated.col(src).sum() < 0 ? -1.0 : 1.0;
    sol.rotated.col(j) = sgn * vr.rotated.col(src);
    sol.rotation.col(j) = sgn * vr.rotation.col(src);
  }
  sol.rotated_variance = sol.rotated.colwise().squaredNorm().transpose();
  sol.uniqueness = (Eigen::VectorXd::Ones(sol.rotated.rows()) - sol.rotated.rowwise().squaredNorm());
  return sol;
}

namespace {

std::string f4(double v) {
  std::string s = fmt::format("{:.4f}", v);
  if (s == "-0.0000") s = "0.0000";
  return s;
}

std::string rows_csv(const csv::Row& header, const std::vector<csv::Row>& rows) {
  std::vector<csv::Row> all{header};
  all.insert(all.end(), rows.begin(), rows.end());
  return csv::format(all);
}

}  // namespace

std::string FaReport::eigen_csv() const { return rows_csv(eigen_header, eigen_rows); }
std::string FaReport::variance_csv() const { return rows_csv(variance_header, variance_rows); }
std::string FaReport::loadings_csv() const { return rows_csv(loadings_header, loadings_rows); }

FaReport fa_report(const FactorSolution& solution) {
  FaReport r;
  const double total = static_cast<double>(solution.eigenvalues.size());
  r.eigen_header = {"Factor", "Eigenvalue", "Proportion", "Cumulative"};
  double cum = 0.0;
  for (Eigen::Index k = 0; k < solution.eigenvalues.size(); ++k) {
    const double prop = solution.eigenvalues(k) / total;
    cum += prop;
    r.eigen_rows.push_back({fmt::format("Factor {}", k + 1), f4(solution.eigenvalues(k)), f4(prop), f4(cum)});
  }
  r.variance_header = {"Factor", "Eigenvalue", "Proportion", "Cumulative"};
  cum = 0.0;
  for (Eigen::Index k = 0; k < solution.rotated_variance.size(); ++k) {
    const double prop = solution.rotated_variance(k) / total;
    cum += prop;
    r.variance_rows.push_back({fmt::format("Factor {}", k + 1), f4(solution.rotated_variance(k)), f4(prop), f4(cum)});
  }
  r.loadings_header = {"Variable"};
  for (Eigen::Index k = 0; k < solution.rotated.cols(); ++k) r.loadings_header.push_back(fmt::format("Factor {}", k + 1));
  r.loadings_header.push_back("Uniqueness");
  for (Eigen::Index i = 0; i < solution.rotated.rows(); ++i) {
    csv::Row row{solution.items.at(static_cast<size_t>(i))};
    for (Eigen::Index k = 0; k < solution.rotated.cols(); ++k) row.push_back(f4(solution.rotated(i, k)));
    row.push_back(f4(solution.uniqueness(i)));
    r.loadings_rows.push_back(std::move(row));
  }
  return r;
}

}  // namespace press::fa
