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

#include "cqfs/builder.hpp"

#include <string>
#include <vector>

#include "cqfs/error.hpp"

namespace cqfs {
namespace {

// Pairs (i, j), i != j, with max(S_ij, S_ji) > kZeroEpsilon, as a symmetric
// 0/1 pattern.
SparseMatrix positive_pattern(const SparseMatrix& s) {
  std::vector<Triplet> entries;
  for (const auto& t : s.triplets()) {
    if (t.row == t.col || t.value <= kZeroEpsilon) continue;
    entries.push_back({t.row, t.col, 1.0});
    entries.push_back({t.col, t.row, 1.0});
  }
  // Both directions present sum to 2; binarize restores the 0/1 pattern.
  return binarize(SparseMatrix::from_triplets(s.n_rows(), s.n_cols(), entries));
}

}  // namespace

void CqfsConfig::validate() const {
  if (!(alpha > 0.0)) throw Error(ErrorCode::InvalidArgument, "alpha must be > 0");
  if (!(beta >= 0.0)) throw Error(ErrorCode::InvalidArgument, "beta must be >= 0");
  if (!(p > 0.0 && p <= 1.0)) throw Error(ErrorCode::InvalidArgument, "p must lie in (0, 1]");
  if (!(s >= 0.0)) throw Error(ErrorCode::InvalidArgument, "s must be >= 0");
}

PenalizationMatrices build_penalization(const SparseMatrix& collaborative, const SparseMatrix& content) {
  if (collaborative.n_rows() != collaborative.n_cols() || content.n_rows() != content.n_cols() ||
      collaborative.n_rows() != content.n_rows()) {
    throw Error(ErrorCode::DimensionMismatch, "similarities must be square over the same items");
  }
  const SparseMatrix cf = positive_pattern(collaborative);
  const SparseMatrix cbf = positive_pattern(content);

  std::vector<Triplet> keep, eliminate;
  for (std::size_t i = 0; i < cbf.n_rows(); ++i) {
    auto content_row = cbf.row(i);
    auto collab_row = cf.row(i);
    std::size_t k = 0;
    for (Index j : content_row.cols) {
      while (k < collab_row.size() && collab_row.cols[k] < j) ++k;
      const bool in_collaborative = k < collab_row.size() && collab_row.cols[k] == j;
      (in_collaborative ? keep : eliminate).push_back({i, j, in_collaborative ? -1.0 : 1.0});
    }
    // Pairs similar only collaboratively, or in neither model, get nothing.
  }
  const std::size_t n = content.n_rows();
  return {SparseMatrix::from_triplets(n, n, keep), SparseMatrix::from_triplets(n, n, eliminate)};
}

SparseMatrix build_ipm(const PenalizationMatrices& pm, double alpha, double beta) {
  return add(scale(pm.keep, alpha), scale(pm.eliminate, beta));
}

SparseMatrix build_fpm(const SparseMatrix& icm, const SparseMatrix& ipm) {
  if (ipm.n_rows() != ipm.n_cols() || icm.n_rows() != ipm.n_rows()) {
    throw Error(ErrorCode::DimensionMismatch, "ICM has " + std::to_string(icm.n_rows()) + " items, IPM is " +
                                                  std::to_string(ipm.n_rows()) + "x" + std::to_string(ipm.n_cols()));
  }
  return matmul(matmul(transpose(icm), ipm), icm);
}

QuboProblem combination_penalty(std::size_t n, double k_target, double s) {
  if (n == 0) throw Error(ErrorCode::InvalidArgument, "penalty needs at least one variable");
  if (!(s >= 0.0)) throw Error(ErrorCode::InvalidArgument, "penalty strength must be >= 0");
  DenseMatrix q(n, n, s);
  for (std::size_t f = 0; f < n; ++f) q(f, f) = s * (1.0 - 2.0 * k_target);
  return QuboProblem(std::move(q), s * k_target * k_target);
}

QuboProblem assemble_qubo(const SparseMatrix& fpm, const CqfsConfig& cfg) {
  cfg.validate();
  if (fpm.n_rows() != fpm.n_cols()) throw Error(ErrorCode::DimensionMismatch, "FPM must be square");
  const std::size_t n = fpm.n_rows();
  const QuboProblem penalty = combination_penalty(n, cfg.p * static_cast<double>(n), cfg.s);

  DenseMatrix q = penalty.q();
  const DenseMatrix dense_fpm = fpm.to_dense();
  for (std::size_t f = 0; f < n; ++f) {
    for (std::size_t g = 0; g < n; ++g) {
      // (a + b) / 2 is commutative in floating point, so q stays symmetric.
      q(f, g) += 0.5 * (dense_fpm(f, g) + dense_fpm(g, f));
    }
  }
  return QuboProblem(std::move(q), penalty.offset());
}

QuboProblem build_cqfs_qubo(const SparseMatrix& collaborative, const SparseMatrix& content, const SparseMatrix& icm,
                            const CqfsConfig& cfg) {
  const auto pm = build_penalization(collaborative, content);
  return assemble_qubo(build_fpm(icm, build_ipm(pm, cfg.alpha, cfg.beta)), cfg);
}

}  // namespace cqfs
