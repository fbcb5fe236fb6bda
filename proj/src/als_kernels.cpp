// Copyright 2026 The cfprox Authors.
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

#include "cfprox/als_kernels.hpp"

#include <cmath>
#include <string>

#include <Eigen/Cholesky>
#include <omp.h>

#include "cfprox/types.hpp"

namespace cfprox {
namespace {

// Smallest acceptable reciprocal condition estimate for the ridge system.
constexpr double kMinRcond = 1e-13;

void check_row(bool ok, const Eigen::Ref<Eigen::RowVectorXd>& out,
               std::size_t row) {
  if (!ok) {
    throw NumericalError("ridge system for row " + std::to_string(row) +
                         " is singular");
  }
  if (!out.allFinite()) {
    throw NumericalError("non-finite factor for row " + std::to_string(row));
  }
}

double row_residual(const CompressedRows& rows, std::size_t r,
                    const FactorMatrix& p, const FactorMatrix& q) {
  double sum = 0.0;
  for (std::size_t e = rows.offsets[r]; e < rows.offsets[r + 1]; ++e) {
    const double err = rows.values[e] - p.row(r).dot(q.row(rows.columns[e]));
    sum += err * err;
  }
  return sum;
}

}  // namespace

bool solve_ridge_row(const CompressedRows& rows, std::size_t row,
                     const FactorMatrix& fixed, double lambda,
                     Eigen::Ref<Eigen::RowVectorXd> out) {
  const auto d = fixed.cols();
  const std::size_t begin = rows.offsets[row];
  const std::size_t n = rows.offsets[row + 1] - begin;

  Eigen::MatrixXd gathered(static_cast<Eigen::Index>(n), d);
  Eigen::VectorXd target(static_cast<Eigen::Index>(n));
  for (std::size_t e = 0; e < n; ++e) {
    gathered.row(static_cast<Eigen::Index>(e)) =
        fixed.row(rows.columns[begin + e]);
    target(static_cast<Eigen::Index>(e)) = rows.values[begin + e];
  }

  Eigen::MatrixXd normal = Eigen::MatrixXd::Zero(d, d);
  normal.selfadjointView<Eigen::Lower>().rankUpdate(gathered.transpose());
  normal.diagonal().array() += lambda;
  const Eigen::VectorXd rhs = gathered.transpose() * target;

  Eigen::LLT<Eigen::MatrixXd> llt(normal);
  if (llt.info() != Eigen::Success || !(llt.rcond() > kMinRcond)) {
    return false;
  }
  out = llt.solve(rhs).transpose();
  return true;
}

void half_sweep_serial(const CompressedRows& rows, const FactorMatrix& fixed,
                       double lambda, FactorMatrix& solved) {
  for (std::size_t r = 0; r < rows.rows(); ++r) {
    auto out = solved.row(static_cast<Eigen::Index>(r));
    check_row(solve_ridge_row(rows, r, fixed, lambda, out), out, r);
  }
}

void half_sweep_parallel(const CompressedRows& rows, const FactorMatrix& fixed,
                         double lambda, FactorMatrix& solved) {
  const auto n = static_cast<std::int64_t>(rows.rows());
  // Exceptions cannot cross the parallel region; remember the first bad row.
  std::int64_t bad_row = -1;
#pragma omp parallel for schedule(dynamic, 16)
  for (std::int64_t r = 0; r < n; ++r) {
    auto out = solved.row(r);
    const bool ok = solve_ridge_row(rows, static_cast<std::size_t>(r), fixed,
                                    lambda, out);
    if (!ok || !out.allFinite()) {
#pragma omp critical(cfprox_bad_row)
      if (bad_row < 0 || r < bad_row) bad_row = r;
    }
  }
  if (bad_row >= 0) {
    auto out = solved.row(bad_row);
    check_row(solve_ridge_row(rows, static_cast<std::size_t>(bad_row), fixed,
                              lambda, out),
              out, static_cast<std::size_t>(bad_row));
  }
}

double als_objective_serial(const CompressedRows& rows, const FactorMatrix& p,
                            const FactorMatrix& q, double lambda) {
  double loss = 0.0;
  for (std::size_t r = 0; r < rows.rows(); ++r) {
    loss += row_residual(rows, r, p, q);
  }
  return loss + lambda * (p.squaredNorm() + q.squaredNorm());
}

double als_objective_parallel(const CompressedRows& rows, const FactorMatrix& p,
                              const FactorMatrix& q, double lambda) {
  const auto n = static_cast<std::int64_t>(rows.rows());
  std::vector<double> partial(rows.rows());
#pragma omp parallel for schedule(static)
  for (std::int64_t r = 0; r < n; ++r) {
    partial[static_cast<std::size_t>(r)] =
        row_residual(rows, static_cast<std::size_t>(r), p, q);
  }
  double loss = 0.0;
  for (double x : partial) loss += x;
  return loss + lambda * (p.squaredNorm() + q.squaredNorm());
}

CompressedRows transpose(const CompressedRows& rows, std::size_t columns) {
  CompressedRows out;
  out.offsets.assign(columns + 1, 0);
  for (auto c : rows.columns) ++out.offsets[c + 1];
  for (std::size_t c = 0; c < columns; ++c) out.offsets[c + 1] += out.offsets[c];
  out.columns.resize(rows.nnz());
  out.values.resize(rows.nnz());
  std::vector<std::size_t> cursor(out.offsets.begin(), out.offsets.end() - 1);
  for (std::size_t r = 0; r < rows.rows(); ++r) {
    for (std::size_t e = rows.offsets[r]; e < rows.offsets[r + 1]; ++e) {
      const std::size_t slot = cursor[rows.columns[e]]++;
      out.columns[slot] = static_cast<std::uint32_t>(r);
      out.values[slot] = rows.values[e];
    }
  }
  return out;
}

}  // namespace cfprox
