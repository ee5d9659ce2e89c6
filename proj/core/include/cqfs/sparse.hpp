// Copyright 2026 The CQFS Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//   http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <span>
#include <vector>

#include "cqfs/dense.hpp"

namespace cqfs {

using Index = std::uint32_t;

/// Stored values with magnitude below this are treated as structural zeros.
inline constexpr double kZeroEpsilon = 1e-12;

struct Triplet {
  std::size_t row;
  std::size_t col;
  double value;
};

/// Row-compressed sparse real matrix.
///
/// Invariants, enforced by every constructor and every operation below:
///  - indices are in range;
///  - column indices are strictly increasing within each row (no duplicates);
///  - no stored value has |v| < kZeroEpsilon.
///
/// Instances are immutable after construction.
class SparseMatrix {
 public:
  struct RowView {
    std::span<const Index> cols;
    std::span<const double> values;
    std::size_t size() const { return cols.size(); }
    bool empty() const { return cols.empty(); }
  };

  SparseMatrix() = default;

  /// Empty (all-zero) matrix of the given shape.
  SparseMatrix(std::size_t n_rows, std::size_t n_cols);

  /// Duplicates are summed; sums below kZeroEpsilon are dropped.
  /// Throws IndexOutOfRange.
  static SparseMatrix from_triplets(std::size_t n_rows, std::size_t n_cols,
                                    std::span<const Triplet> triplets);

  /// Takes ownership of CSR arrays. Validates the ordering invariants and
  /// drops near-zero values.
  static SparseMatrix from_csr(std::size_t n_rows, std::size_t n_cols, std::vector<std::size_t> row_ptr,
                               std::vector<Index> cols, std::vector<double> values);

  static SparseMatrix identity(std::size_t n);

  static SparseMatrix from_dense(const DenseMatrix& dense);

  std::size_t n_rows() const { return n_rows_; }
  std::size_t n_cols() const { return n_cols_; }
  std::size_t nnz() const { return values_.size(); }

  RowView row(std::size_t r) const;

  /// Value at (r, c); 0 when not stored.
  double at(std::size_t r, std::size_t c) const;

  std::vector<Triplet> triplets() const;

  const std::vector<std::size_t>& row_ptr() const { return row_ptr_; }
  const std::vector<Index>& col_indices() const { return cols_; }
  const std::vector<double>& values() const { return values_; }

  DenseMatrix to_dense() const;

  bool operator==(const SparseMatrix& other) const = default;

 private:
  std::size_t n_rows_ = 0;
  std::size_t n_cols_ = 0;
  std::vector<std::size_t> row_ptr_{0};
  std::vector<Index> cols_;
  std::vector<double> values_;
};

enum class Norm { L1, L2 };

SparseMatrix transpose(const SparseMatrix& m);

/// Exact sparse product. Within each output entry the terms are accumulated
/// in ascending order of the shared index. Throws DimensionMismatch.
SparseMatrix matmul(const SparseMatrix& a, const SparseMatrix& b);

/// Divides each nonzero row by its L1 or L2 norm; zero rows are left alone.
SparseMatrix row_normalize(const SparseMatrix& m, Norm norm);

/// v -> v^exponent on stored values; exponent 0 maps every stored value to 1.
/// Throws NegativeBase for a non-integer exponent applied to a negative value.
SparseMatrix elementwise_pow(const SparseMatrix& m, double exponent);

/// Keeps the k largest values of each row; ties at the cutoff go to the
/// smaller column index.
SparseMatrix top_k_per_row(const SparseMatrix& m, std::size_t k);

/// Entrywise a + b. Throws DimensionMismatch.
SparseMatrix add(const SparseMatrix& a, const SparseMatrix& b);

SparseMatrix scale(const SparseMatrix& m, double factor);

/// Removes stored diagonal entries.
SparseMatrix drop_diagonal(const SparseMatrix& m);

/// Multiplies column j by factors[j].
SparseMatrix scale_columns(const SparseMatrix& m, std::span<const double> factors);

/// Keeps only the columns with keep[j] true (shape unchanged).
SparseMatrix mask_columns(const SparseMatrix& m, const std::vector<bool>& keep);

/// Keeps only the rows with keep[i] true (shape unchanged).
SparseMatrix mask_rows(const SparseMatrix& m, const std::vector<bool>& keep);

/// Replaces every stored value by 1.
SparseMatrix binarize(const SparseMatrix& m);

/// Number of stored entries per column.
std::vector<std::size_t> column_counts(const SparseMatrix& m);

/// Number of stored entries per row.
std::vector<std::size_t> row_counts(const SparseMatrix& m);

/// Tab-separated COO text: a `n_rows n_cols nnz` header line, then one
/// `row col value` line per entry in row-major order, values with 17
/// significant digits.
void write_coo(std::ostream& out, const SparseMatrix& m);
void write_coo(const std::filesystem::path& path, const SparseMatrix& m);
SparseMatrix read_coo(std::istream& in);
SparseMatrix read_coo(const std::filesystem::path& path);

}  // namespace cqfs
