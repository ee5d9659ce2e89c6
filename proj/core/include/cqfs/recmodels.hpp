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
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "cqfs/dense.hpp"
#include "cqfs/sparse.hpp"

namespace cqfs {

enum class SimilarityKind { ItemKnnCf, ItemKnnCbf, PureSvd, Rp3Beta };
enum class FeatureWeighting { None, TfIdf, Bm25 };

std::string_view to_string(SimilarityKind kind);
std::string_view to_string(FeatureWeighting weighting);
SimilarityKind parse_similarity_kind(std::string_view text);
FeatureWeighting parse_feature_weighting(std::string_view text);

/// Hyperparameters that produced a similarity model; unset fields do not
/// apply to the model's kind.
struct SimilarityParams {
  std::optional<std::size_t> top_k;
  std::optional<double> shrink;
  std::optional<bool> normalize;
  std::optional<FeatureWeighting> weighting;
  std::optional<std::size_t> num_factors;
  std::optional<double> alpha;
  std::optional<double> beta;
  std::optional<std::uint64_t> seed;

  bool operator==(const SimilarityParams&) const = default;
};

/// Item-item similarity. The diagonal is always empty and all values are
/// finite.
struct SimilarityModel {
  SimilarityKind kind = SimilarityKind::ItemKnnCf;
  SparseMatrix s;
  SimilarityParams params;
};

/// Cosine kNN over the rows of `vectors`:
///   normalize:  s_ij = <v_i, v_j> / (|v_i| |v_j| + shrink)
///   otherwise:  s_ij = <v_i, v_j>
/// then the diagonal is removed and each row keeps its top_k values.
SimilarityModel cosine_knn(const SparseMatrix& vectors, std::size_t top_k, double shrink, bool normalize,
                           SimilarityKind kind = SimilarityKind::ItemKnnCf);

/// None leaves the matrix untouched. TfIdf sets entry (i, f) to
/// ln(n_items / df_f). Bm25 uses idf_f = ln((n - df + 0.5) / (df + 0.5) + 1)
/// with k1 = 1.2 and b = 0.75 on item lengths.
SparseMatrix apply_feature_weighting(const SparseMatrix& icm, FeatureWeighting scheme);

inline constexpr double kBm25K1 = 1.2;
inline constexpr double kBm25B = 0.75;

struct FeatureWeights {
  std::vector<double> w;
};

/// Per-feature score ln(n_items / df_f); 0 for features no item carries.
FeatureWeights tfidf_feature_scores(const SparseMatrix& icm);

/// ItemKNN CF: cosine kNN on the item columns of the URM, after optional
/// weighting of the binarized item vectors.
SimilarityModel item_knn_cf(const SparseMatrix& urm, std::size_t top_k, double shrink, bool normalize,
                            FeatureWeighting weighting = FeatureWeighting::None);

/// ItemKNN CBF: cosine kNN on (weighted) ICM rows.
SimilarityModel item_knn_cbf(const SparseMatrix& icm, std::size_t top_k, double shrink, bool normalize,
                             FeatureWeighting weighting = FeatureWeighting::None);

/// Rank-k factors of m ~= U diag(sigma) V^T. U is rows x k, V is cols x k,
/// sigma descending.
struct TruncatedSvd {
  DenseMatrix u;
  std::vector<double> sigma;
  DenseMatrix v;
};

inline constexpr std::size_t kSvdOversampling = 10;
inline constexpr std::size_t kSvdPowerIterations = 7;

/// Randomized subspace iteration with a seeded Gaussian start.
/// Throws RankTooLarge unless 1 <= k <= min(rows, cols).
TruncatedSvd truncated_svd(const SparseMatrix& m, std::size_t k, std::uint64_t seed,
                           std::size_t oversampling = kSvdOversampling,
                           std::size_t power_iterations = kSvdPowerIterations);

/// PureSVD folding-in: S = V V^T from the rank-num_factors SVD of the URM,
/// diagonal removed. No neighbourhood pruning.
SimilarityModel pure_svd(const SparseMatrix& urm, std::size_t num_factors, std::uint64_t seed);

/// Random-walk item-item transition matrix of RP3beta before the diagonal is
/// removed and before pruning: (P_iu^alpha)(P_ui^alpha), column j divided by
/// pop(j)^beta.
SparseMatrix rp3beta_transition(const SparseMatrix& urm, double alpha, double beta);

/// RP3beta: rp3beta_transition, diagonal removed, top_k per row, and an
/// optional L1 row normalization afterwards.
SimilarityModel rp3beta(const SparseMatrix& urm, double alpha, double beta, std::size_t top_k, bool normalize);

using RankedLists = std::vector<std::vector<std::size_t>>;

/// scores = profiles * S. For each user, ranks the candidate items (all items
/// when `candidates` is empty) by descending score, ties by smaller item
/// index; seen items are removed when exclude_seen is set. Lists hold at most
/// `cutoff` items. Throws DimensionMismatch.
RankedLists score_and_rank(const SparseMatrix& similarity, const SparseMatrix& profiles, std::size_t cutoff,
                           bool exclude_seen, const std::optional<std::vector<std::size_t>>& candidates = std::nullopt,
                           std::size_t workers = 1);

inline RankedLists score_and_rank(const SimilarityModel& model, const SparseMatrix& profiles, std::size_t cutoff,
                                  bool exclude_seen,
                                  const std::optional<std::vector<std::size_t>>& candidates = std::nullopt,
                                  std::size_t workers = 1) {
  return score_and_rank(model.s, profiles, cutoff, exclude_seen, candidates, workers);
}

/// `<stem>.coo` with the similarity and `<stem>.json` with kind and
/// hyperparameters.
void save_model(const std::filesystem::path& stem, const SimilarityModel& model);
SimilarityModel load_model(const std::filesystem::path& stem);

std::string params_to_json(SimilarityKind kind, const SimilarityParams& params);

}  // namespace cqfs
