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

#include "cqfs/sparse.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <istream>
#include <numeric>
#include <ostream>
#include <sstream>
#include <string>

#include "cqfs/error.hpp"
#include "cqfs/io.hpp"

namespace cqfs {
namespace {

bool is_zero(double v) { return std::abs(v) < kZeroEpsilon; }

void require_same_shape(const SparseMatrix& a, const SparseMatrix& b, const char* op) {
  if (a.n_rows() != b.n_rows() || a.n_cols() != b.n_cols()) {
    throw Error(ErrorCode::DimensionMismatch,
                std::string(op) + ": " + std::to_string(a.n_rows()) + "x" + std::to_string(a.n_cols()) +
                    " vs " + std::to_string(b.n_rows()) + "x" + std::to_string(b.n_cols()));
  }
}

// Applies fn(row, col, value) -> new value to every stored entry, dropping
// results that round to zero.
template <class Fn>
SparseMatrix map_values(const SparseMatrix& m, Fn&& fn) {
  std::vector<std::size_t> row_ptr(m.n_rows() + 1, 0);
  std::vector<Index> cols;
  std::vector<double> values;
  cols.reserve(m.nnz());
  values.reserve(m.nnz());
  for (std::size_t r = 0; r < m.n_rows(); ++r) {
    auto row = m.row(r);
    for (std::size_t k = 0; k < row.size(); ++k) {
      double v = fn(r, row.cols[k], row.values[k]);
      if (!is_zero(v)) {
        cols.push_back(row.cols[k]);
        values.push_back(v);
      }
    }
    row_ptr[r + 1] = cols.size();
  }
  return SparseMatrix::from_csr(m.n_rows(), m.n_cols(), std::move(row_ptr), std::move(cols),
                                std::move(values));
}

}  // namespace

SparseMatrix::SparseMatrix(std::size_t n_rows, std::size_t n_cols)
    : n_rows_(n_rows), n_cols_(n_cols), row_ptr_(n_rows + 1, 0) {}

SparseMatrix SparseMatrix::from_triplets(std::size_t n_rows, std::size_t n_cols,
                                         std::span<const Triplet> triplets) {
  for (const auto& t : triplets) {
    if (t.row >= n_rows || t.col >= n_cols) {
      throw Error(ErrorCode::IndexOutOfRange, "triplet (" + std::to_string(t.row) + ", " +
                                                  std::to_string(t.col) + ") outside " +
                                                  std::to_string(n_rows) + "x" + std::to_string(n_cols));
    }
  }
  std::vector<std::size_t> order(triplets.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  // Stable so that duplicates are summed in input order.
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    const auto& ta = triplets[a];
    const auto& tb = triplets[b];
    return ta.row != tb.row ? ta.row < tb.row : ta.col < tb.col;
  });

  std::vector<std::size_t> row_ptr(n_rows + 1, 0);
  std::vector<Index> cols;
  std::vector<double> values;
  cols.reserve(triplets.size());
  values.reserve(triplets.size());

  std::size_t k = 0;
  while (k < order.size()) {
    const auto& first = triplets[order[k]];
    double sum = 0.0;
    std::size_t j = k;
    while (j < order.size() && triplets[order[j]].row == first.row && triplets[order[j]].col == first.col) {
      sum += triplets[order[j]].value;
      ++j;
    }
    if (!is_zero(sum)) {
      cols.push_back(static_cast<Index>(first.col));
      values.push_back(sum);
      ++row_ptr[first.row + 1];
    }
    k = j;
  }
  for (std::size_t r = 0; r < n_rows; ++r) row_ptr[r + 1] += row_ptr[r];
  return from_csr(n_rows, n_cols, std::move(row_ptr), std::move(cols), std::move(values));
}

SparseMatrix SparseMatrix::from_csr(std::size_t n_rows, std::size_t n_cols, std::vector<std::size_t> row_ptr,
                                    std::vector<Index> cols, std::vector<double> values) {
  if (row_ptr.size() != n_rows + 1 || row_ptr.front() != 0 || row_ptr.back() != cols.size() ||
      cols.size() != values.size()) {
    throw Error(ErrorCode::InvalidArgument, "malformed CSR arrays");
  }
  SparseMatrix m;
  m.n_rows_ = n_rows;
  m.n_cols_ = n_cols;
  m.row_ptr_.assign(n_rows + 1, 0);
  m.cols_.reserve(cols.size());
  m.values_.reserve(values.size());
  for (std::size_t r = 0; r < n_rows; ++r) {
    if (row_ptr[r + 1] < row_ptr[r]) throw Error(ErrorCode::InvalidArgument, "row_ptr not monotone");
    for (std::size_t k = row_ptr[r]; k < row_ptr[r + 1]; ++k) {
      if (cols[k] >= n_cols) throw Error(ErrorCode::IndexOutOfRange, "column index out of range");
      if (k > row_ptr[r] && cols[k] <= cols[k - 1]) {
        throw Error(ErrorCode::InvalidArgument, "column indices not strictly increasing");
      }
      if (!std::isfinite(values[k])) throw Error(ErrorCode::InvalidArgument, "non-finite value");
      if (is_zero(values[k])) continue;
      m.cols_.push_back(cols[k]);
      m.values_.push_back(values[k]);
    }
    m.row_ptr_[r + 1] = m.cols_.size();
  }
  return m;
}

SparseMatrix SparseMatrix::identity(std::size_t n) {
  std::vector<std::size_t> row_ptr(n + 1);
  std::vector<Index> cols(n);
  for (std::size_t i = 0; i < n; ++i) {
    row_ptr[i + 1] = i + 1;
    cols[i] = static_cast<Index>(i);
  }
  return from_csr(n, n, std::move(row_ptr), std::move(cols), std::vector<double>(n, 1.0));
}

SparseMatrix SparseMatrix::from_dense(const DenseMatrix& dense) {
  std::vector<std::size_t> row_ptr(dense.rows + 1, 0);
  std::vector<Index> cols;
  std::vector<double> values;
  for (std::size_t r = 0; r < dense.rows; ++r) {
    for (std::size_t c = 0; c < dense.cols; ++c) {
      double v = dense(r, c);
      if (!is_zero(v)) {
        cols.push_back(static_cast<Index>(c));
        values.push_back(v);
      }
    }
    row_ptr[r + 1] = cols.size();
  }
  return from_csr(dense.rows, dense.cols, std::move(row_ptr), std::move(cols), std::move(values));
}

SparseMatrix::RowView SparseMatrix::row(std::size_t r) const {
  const std::size_t begin = row_ptr_[r];
  const std::size_t len = row_ptr_[r + 1] - begin;
  return {std::span<const Index>(cols_.data() + begin, len), std::span<const double>(values_.data() + begin, len)};
}

double SparseMatrix::at(std::size_t r, std::size_t c) const {
  if (r >= n_rows_ || c >= n_cols_) throw Error(ErrorCode::IndexOutOfRange, "at()");
  auto rv = row(r);
  auto it = std::lower_bound(rv.cols.begin(), rv.cols.end(), static_cast<Index>(c));
  if (it == rv.cols.end() || *it != c) return 0.0;
  return rv.values[static_cast<std::size_t>(it - rv.cols.begin())];
}

std::vector<Triplet> SparseMatrix::triplets() const {
  std::vector<Triplet> out;
  out.reserve(nnz());
  for (std::size_t r = 0; r < n_rows_; ++r) {
    auto rv = row(r);
    for (std::size_t k = 0; k < rv.size(); ++k) out.push_back({r, rv.cols[k], rv.values[k]});
  }
  return out;
}

DenseMatrix SparseMatrix::to_dense() const {
  DenseMatrix d(n_rows_, n_cols_);
  for (std::size_t r = 0; r < n_rows_; ++r) {
    auto rv = row(r);
    for (std::size_t k = 0; k < rv.size(); ++k) d(r, rv.cols[k]) = rv.values[k];
  }
  return d;
}

SparseMatrix transpose(const SparseMatrix& m) {
  std::vector<std::size_t> row_ptr(m.n_cols() + 1, 0);
  for (Index c : m.col_indices()) ++row_ptr[c + 1];
  for (std::size_t c = 0; c < m.n_cols(); ++c) row_ptr[c + 1] += row_ptr[c];

  std::vector<Index> cols(m.nnz());
  std::vector<double> values(m.nnz());
  std::vector<std::size_t> cursor(row_ptr.begin(), row_ptr.end() - 1);
  // Walking rows in ascending order keeps each output row sorted.
  for (std::size_t r = 0; r < m.n_rows(); ++r) {
    auto rv = m.row(r);
    for (std::size_t k = 0; k < rv.size(); ++k) {
      std::size_t dst = cursor[rv.cols[k]]++;
      cols[dst] = static_cast<Index>(r);
      values[dst] = rv.values[k];
    }
  }
  return SparseMatrix::from_csr(m.n_cols(), m.n_rows(), std::move(row_ptr), std::move(cols), std::move(values));
}

SparseMatrix matmul(const SparseMatrix& a, const SparseMatrix& b) {
  if (a.n_cols() != b.n_rows()) {
    throw Error(ErrorCode::DimensionMismatch, "matmul: " + std::to_string(a.n_rows()) + "x" +
                                                  std::to_string(a.n_cols()) + " times " +
                                                  std::to_string(b.n_rows()) + "x" + std::to_string(b.n_cols()));
  }
  const std::size_t n_out = b.n_cols();
  std::vector<double> accumulator(n_out, 0.0);
  std::vector<char> touched(n_out, 0);
  std::vector<Index> pattern;

  std::vector<std::size_t> row_ptr(a.n_rows() + 1, 0);
  std::vector<Index> cols;
  std::vector<double> values;

  // Gustavson's row-by-row product with a dense accumulator.
  for (std::size_t r = 0; r < a.n_rows(); ++r) {
    pattern.clear();
    auto arow = a.row(r);
    for (std::size_t ka = 0; ka < arow.size(); ++ka) {
      const double av = arow.values[ka];
      auto brow = b.row(arow.cols[ka]);
      for (std::size_t kb = 0; kb < brow.size(); ++kb) {
        const Index c = brow.cols[kb];
        if (!touched[c]) {
          touched[c] = 1;
          pattern.push_back(c);
        }
        accumulator[c] += av * brow.values[kb];
      }
    }
    std::sort(pattern.begin(), pattern.end());
    for (Index c : pattern) {
      if (!is_zero(accumulator[c])) {
        cols.push_back(c);
        values.push_back(accumulator[c]);
      }
      accumulator[c] = 0.0;
      touched[c] = 0;
    }
    row_ptr[r + 1] = cols.size();
  }
  return SparseMatrix::from_csr(a.n_rows(), n_out, std::move(row_ptr), std::move(cols), std::move(values));
}

SparseMatrix row_normalize(const SparseMatrix& m, Norm norm) {
  std::vector<double> norms(m.n_rows(), 0.0);
  for (std::size_t r = 0; r < m.n_rows(); ++r) {
    double acc = 0.0;
    for (double v : m.row(r).values) acc += norm == Norm::L1 ? std::abs(v) : v * v;
    norms[r] = norm == Norm::L1 ? acc : std::sqrt(acc);
  }
  return map_values(m, [&](std::size_t r, Index, double v) { return norms[r] > 0.0 ? v / norms[r] : v; });
}

SparseMatrix elementwise_pow(const SparseMatrix& m, double exponent) {
  if (exponent < 0.0 || !std::isfinite(exponent)) {
    throw Error(ErrorCode::InvalidArgument, "exponent must be finite and >= 0");
  }
  const bool integral = std::floor(exponent) == exponent;
  if (!integral) {
    for (double v : m.values()) {
      if (v < 0.0) throw Error(ErrorCode::NegativeBase, "non-integer power of a negative value");
    }
  }
  if (exponent == 0.0) return map_values(m, [](std::size_t, Index, double) { return 1.0; });
  if (exponent == 1.0) return m;
  return map_values(m, [&](std::size_t, Index, double v) { return std::pow(v, exponent); });
}

SparseMatrix top_k_per_row(const SparseMatrix& m, std::size_t k) {
  if (k == 0) throw Error(ErrorCode::InvalidArgument, "top_k_per_row requires k >= 1");
  std::vector<std::size_t> row_ptr(m.n_rows() + 1, 0);
  std::vector<Index> cols;
  std::vector<double> values;
  std::vector<std::size_t> order;
  for (std::size_t r = 0; r < m.n_rows(); ++r) {
    auto rv = m.row(r);
    if (rv.size() <= k) {
      cols.insert(cols.end(), rv.cols.begin(), rv.cols.end());
      values.insert(values.end(), rv.values.begin(), rv.values.end());
    } else {
      order.resize(rv.size());
      std::iota(order.begin(), order.end(), std::size_t{0});
      auto better = [&](std::size_t x, std::size_t y) {
        if (rv.values[x] != rv.values[y]) return rv.values[x] > rv.values[y];
        return rv.cols[x] < rv.cols[y];
      };
      std::nth_element(order.begin(), order.begin() + static_cast<std::ptrdiff_t>(k) - 1, order.end(), better);
      order.resize(k);
      std::sort(order.begin(), order.end());  // positions are already column-ordered
      for (std::size_t pos : order) {
        cols.push_back(rv.cols[pos]);
        values.push_back(rv.values[pos]);
      }
    }
    row_ptr[r + 1] = cols.size();
  }
  return SparseMatrix::from_csr(m.n_rows(), m.n_cols(), std::move(row_ptr), std::move(cols), std::move(values));
}

SparseMatrix add(const SparseMatrix& a, const SparseMatrix& b) {
  require_same_shape(a, b, "add");
  std::vector<std::size_t> row_ptr(a.n_rows() + 1, 0);
  std::vector<Index> cols;
  std::vector<double> values;
  cols.reserve(a.nnz() + b.nnz());
  values.reserve(a.nnz() + b.nnz());
  for (std::size_t r = 0; r < a.n_rows(); ++r) {
    auto ra = a.row(r);
    auto rb = b.row(r);
    std::size_t i = 0, j = 0;
    auto emit = [&](Index c, double v) {
      if (!is_zero(v)) {
        cols.push_back(c);
        values.push_back(v);
      }
    };
    while (i < ra.size() || j < rb.size()) {
      if (j == rb.size() || (i < ra.size() && ra.cols[i] < rb.cols[j])) {
        emit(ra.cols[i], ra.values[i]);
        ++i;
      } else if (i == ra.size() || rb.cols[j] < ra.cols[i]) {
        emit(rb.cols[j], rb.values[j]);
        ++j;
      } else {
        emit(ra.cols[i], ra.values[i] + rb.values[j]);
        ++i;
        ++j;
      }
    }
    row_ptr[r + 1] = cols.size();
  }
  return SparseMatrix::from_csr(a.n_rows(), a.n_cols(), std::move(row_ptr), std::move(cols), std::move(values));
}

SparseMatrix scale(const SparseMatrix& m, double factor) {
  return map_values(m, [&](std::size_t, Index, double v) { return v * factor; });
}

SparseMatrix drop_diagonal(const SparseMatrix& m) {
  return map_values(m, [](std::size_t r, Index c, double v) { return r == c ? 0.0 : v; });
}

SparseMatrix scale_columns(const SparseMatrix& m, std::span<const double> factors) {
  if (factors.size() != m.n_cols()) throw Error(ErrorCode::DimensionMismatch, "scale_columns");
  return map_values(m, [&](std::size_t, Index c, double v) { return v * factors[c]; });
}

SparseMatrix mask_columns(const SparseMatrix& m, const std::vector<bool>& keep) {
  if (keep.size() != m.n_cols()) throw Error(ErrorCode::DimensionMismatch, "mask_columns");
  return map_values(m, [&](std::size_t, Index c, double v) { return keep[c] ? v : 0.0; });
}

SparseMatrix mask_rows(const SparseMatrix& m, const std::vector<bool>& keep) {
  if (keep.size() != m.n_rows()) throw Error(ErrorCode::DimensionMismatch, "mask_rows");
  return map_values(m, [&](std::size_t r, Index, double v) { return keep[r] ? v : 0.0; });
}

SparseMatrix binarize(const SparseMatrix& m) {
  return map_values(m, [](std::size_t, Index, double) { return 1.0; });
}

std::vector<std::size_t> column_counts(const SparseMatrix& m) {
  std::vector<std::size_t> counts(m.n_cols(), 0);
  for (Index c : m.col_indices()) ++counts[c];
  return counts;
}

std::vector<std::size_t> row_counts(const SparseMatrix& m) {
  std::vector<std::size_t> counts(m.n_rows(), 0);
  for (std::size_t r = 0; r < m.n_rows(); ++r) counts[r] = m.row(r).size();
  return counts;
}

void write_coo(std::ostream& out, const SparseMatrix& m) {
  out << m.n_rows() << '\t' << m.n_cols() << '\t' << m.nnz() << '\n';
  char buffer[64];
  for (std::size_t r = 0; r < m.n_rows(); ++r) {
    auto rv = m.row(r);
    for (std::size_t k = 0; k < rv.size(); ++k) {
      std::snprintf(buffer, sizeof buffer, "%.17g", rv.values[k]);
      out << r << '\t' << rv.cols[k] << '\t' << buffer << '\n';
    }
  }
}

void write_coo(const std::filesystem::path& path, const SparseMatrix& m) {
  std::ostringstream out;
  write_coo(out, m);
  write_file_atomic(path, out.str());
}

SparseMatrix read_coo(std::istream& in) {
  std::string line;
  std::size_t line_no = 0;
  auto fail = [&](const std::string& why) -> Error {
    return Error(ErrorCode::ParseError, "COO line " + std::to_string(line_no) + ": " + why);
  };
  if (!std::getline(in, line)) throw Error(ErrorCode::ParseError, "COO: missing header");
  ++line_no;
  std::size_t n_rows = 0, n_cols = 0, nnz = 0;
  {
    std::istringstream header(line);
    if (!(header >> n_rows >> n_cols >> nnz)) throw fail("bad header");
  }
  std::vector<Triplet> triplets;
  triplets.reserve(nnz);
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    std::istringstream fields(line);
    Triplet t{};
    if (!(fields >> t.row >> t.col >> t.value)) throw fail("expected row, col, value");
    triplets.push_back(t);
  }
  if (triplets.size() != nnz) throw fail("entry count does not match header");
  try {
    return SparseMatrix::from_triplets(n_rows, n_cols, triplets);
  } catch (const Error& e) {
    throw Error(ErrorCode::ParseError, std::string("COO: ") + e.what());
  }
}

SparseMatrix read_coo(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::Io, "cannot open " + path.string());
  return read_coo(in);
}

}  // namespace cqfs
