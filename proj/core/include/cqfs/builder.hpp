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

#include "cqfs/qubo.hpp"
#include "cqfs/recmodels.hpp"
#include "cqfs/sparse.hpp"

namespace cqfs {

/// Item-pair agreement between a collaborative and a content similarity.
///
/// keep (-1) marks pairs similar in both models; eliminate (+1) marks pairs
/// similar only in the content model. Both are symmetric with an empty
/// diagonal, and their supports are disjoint.
struct PenalizationMatrices {
  SparseMatrix keep;
  SparseMatrix eliminate;
};

/// Hyperparameters of one feature-selection QUBO. The target feature count is
/// k = p * n_features, kept real-valued.
struct CqfsConfig {
  double alpha = 1.0;
  double beta = 0.0;
  double p = 1.0;
  double s = 0.0;

  /// Throws InvalidArgument unless alpha > 0, beta >= 0, p in (0, 1], s >= 0.
  void validate() const;
};

/// Compares the supports of the two similarities pair by pair. A pair counts
/// as similar in a model when max(S_ij, S_ji) > kZeroEpsilon; negative values
/// count as absent. Throws DimensionMismatch.
PenalizationMatrices build_penalization(const SparseMatrix& collaborative, const SparseMatrix& content);

inline PenalizationMatrices build_penalization(const SimilarityModel& collaborative, const SimilarityModel& content) {
  return build_penalization(collaborative.s, content.s);
}

/// alpha * keep + beta * eliminate.
SparseMatrix build_ipm(const PenalizationMatrices& pm, double alpha, double beta);

/// ICM^T * IPM * ICM, features x features. Throws DimensionMismatch.
SparseMatrix build_fpm(const SparseMatrix& icm, const SparseMatrix& ipm);

/// Expansion of s * (sum(x) - k)^2 using x_f^2 = x_f: diagonal s * (1 - 2k),
/// off-diagonal s, offset s * k^2.
QuboProblem combination_penalty(std::size_t n, double k_target, double s);

/// (FPM + FPM^T) / 2 plus the combination penalty for k = p * n.
QuboProblem assemble_qubo(const SparseMatrix& fpm, const CqfsConfig& cfg);

/// build_penalization -> build_ipm -> build_fpm -> assemble_qubo.
QuboProblem build_cqfs_qubo(const SparseMatrix& collaborative, const SparseMatrix& content, const SparseMatrix& icm,
                            const CqfsConfig& cfg);

}  // namespace cqfs
