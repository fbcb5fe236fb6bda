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

#pragma once

#include <cstddef>
#include <cstdint>
#include <vector>

#include <Eigen/Core>

// Data-parallel kernels behind ALS. Every row solve in a half-sweep is
// independent, so the OpenMP driver and the serial reference driver share
// solve_ridge_row and agree bit for bit. Reductions are accumulated per row
// and summed in row order, so results do not depend on the thread count.

namespace cfprox {

using FactorMatrix =
    Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

// One side of the rating matrix in compressed-row form. Row r's entries are
// (columns[e], values[e]) for e in [offsets[r], offsets[r + 1]), with
// columns ascending.
struct CompressedRows {
  std::vector<std::size_t> offsets{0};
  std::vector<std::uint32_t> columns;
  std::vector<double> values;

  std::size_t rows() const { return offsets.size() - 1; }
  std::size_t nnz() const { return values.size(); }
};

// argmin_p sum_e (values[e] - p . fixed.row(columns[e]))^2 + lambda ||p||^2,
// written into `out`. Returns false when the normal equations are not
// numerically positive definite (only possible with lambda == 0).
bool solve_ridge_row(const CompressedRows& rows, std::size_t row,
                     const FactorMatrix& fixed, double lambda,
                     Eigen::Ref<Eigen::RowVectorXd> out);

// Re-solves every row of `solved` against `fixed`. Throws NumericalError on
// a failed solve or a non-finite result.
void half_sweep_serial(const CompressedRows& rows, const FactorMatrix& fixed,
                       double lambda, FactorMatrix& solved);
void half_sweep_parallel(const CompressedRows& rows, const FactorMatrix& fixed,
                         double lambda, FactorMatrix& solved);

// sum over entries (r - p_row . q_col)^2 + lambda (||P||^2 + ||Q||^2), with
// `rows` indexing P's rows and columns indexing Q's rows.
double als_objective_serial(const CompressedRows& rows, const FactorMatrix& p,
                            const FactorMatrix& q, double lambda);
double als_objective_parallel(const CompressedRows& rows, const FactorMatrix& p,
                              const FactorMatrix& q, double lambda);

// Transposes a compressed-row matrix with `columns` distinct column ids.
CompressedRows transpose(const CompressedRows& rows, std::size_t columns);

}  // namespace cfprox
