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

// Randomized truncated SVD (range finder with subspace iteration) and the
// PureSVD folding-in similarity built on it.

#include <algorithm>
#include <cmath>

#include <Eigen/Dense>

#include "cqfs/error.hpp"
#include "cqfs/random.hpp"
#include "cqfs/recmodels.hpp"

namespace cqfs {
namespace {

using Matrix = Eigen::MatrixXd;

// A * X for CSR A.
Matrix multiply(const SparseMatrix& a, const Matrix& x) {
  Matrix y = Matrix::Zero(static_cast<Eigen::Index>(a.n_rows()), x.cols());
  for (std::size_t r = 0; r < a.n_rows(); ++r) {
    auto row = a.row(r);
    for (std::size_t k = 0; k < row.size(); ++k) {
      y.row(static_cast<Eigen::Index>(r)) += row.values[k] * x.row(row.cols[k]);
    }
  }
  return y;
}

// A^T * X for CSR A.
Matrix multiply_transposed(const SparseMatrix& a, const Matrix& x) {
  Matrix y = Matrix::Zero(static_cast<Eigen::Index>(a.n_cols()), x.cols());
  for (std::size_t r = 0; r < a.n_rows(); ++r) {
    auto row = a.row(r);
    for (std::size_t k = 0; k < row.size(); ++k) {
      y.row(row.cols[k]) += row.values[k] * x.row(static_cast<Eigen::Index>(r));
    }
  }
  return y;
}

Matrix orthonormal_basis(const Matrix& y) {
  Eigen::HouseholderQR<Matrix> qr(y);
  return qr.householderQ() * Matrix::Identity(y.rows(), y.cols());
}

DenseMatrix to_dense(const Matrix& m) {
  DenseMatrix out(static_cast<std::size_t>(m.rows()), static_cast<std::size_t>(m.cols()));
  for (Eigen::Index r = 0; r < m.rows(); ++r) {
    for (Eigen::Index c = 0; c < m.cols(); ++c) out(static_cast<std::size_t>(r), static_cast<std::size_t>(c)) = m(r, c);
  }
  return out;
}

}  // namespace

TruncatedSvd truncated_svd(const SparseMatrix& m, std::size_t k, std::uint64_t seed, std::size_t oversampling,
                           std::size_t power_iterations) {
  const std::size_t max_rank = std::min(m.n_rows(), m.n_cols());
  if (k == 0 || k > max_rank) {
    throw Error(ErrorCode::RankTooLarge,
                "rank " + std::to_string(k) + " outside [1, " + std::to_string(max_rank) + "]");
  }
  const auto sketch = static_cast<Eigen::Index>(std::min(k + oversampling, max_rank));

  Rng rng(seed);
  Matrix omega(static_cast<Eigen::Index>(m.n_cols()), sketch);
  for (Eigen::Index r = 0; r < omega.rows(); ++r) {
    for (Eigen::Index c = 0; c < omega.cols(); ++c) omega(r, c) = rng.normal();
  }

  // Re-orthonormalizing after every product keeps the small singular
  // directions from being swamped in floating point.
  Matrix q = orthonormal_basis(multiply(m, omega));
  for (std::size_t it = 0; it < power_iterations; ++it) {
    Matrix z = orthonormal_basis(multiply_transposed(m, q));
    q = orthonormal_basis(multiply(m, z));
  }

  // B = Q^T A, computed as (A^T Q)^T.
  Matrix b = multiply_transposed(m, q).transpose();
  Eigen::JacobiSVD<Matrix> svd(b, Eigen::ComputeThinU | Eigen::ComputeThinV);

  const auto rank = static_cast<Eigen::Index>(k);
  TruncatedSvd out;
  out.u = to_dense((q * svd.matrixU()).leftCols(rank));
  out.v = to_dense(svd.matrixV().leftCols(rank));
  out.sigma.resize(k);
  for (std::size_t i = 0; i < k; ++i) out.sigma[i] = svd.singularValues()(static_cast<Eigen::Index>(i));
  return out;
}

SimilarityModel pure_svd(const SparseMatrix& urm, std::size_t num_factors, std::uint64_t seed) {
  const TruncatedSvd svd = truncated_svd(urm, num_factors, seed);
  const std::size_t n = urm.n_cols();

  DenseMatrix s(n, n);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i + 1; j < n; ++j) {
      double acc = 0.0;
      for (std::size_t f = 0; f < num_factors; ++f) acc += svd.v(i, f) * svd.v(j, f);
      s(i, j) = acc;
      s(j, i) = acc;
    }
  }

  SimilarityModel model;
  model.kind = SimilarityKind::PureSvd;
  model.s = SparseMatrix::from_dense(s);
  model.params.num_factors = num_factors;
  model.params.seed = seed;
  return model;
}

}  // namespace cqfs
