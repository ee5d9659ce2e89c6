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

#include "cqfs/recmodels.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include <json.hpp>

#include "cqfs/error.hpp"
#include "cqfs/io.hpp"
#include "cqfs/parallel.hpp"

namespace cqfs {

std::string_view to_string(SimilarityKind kind) {
  switch (kind) {
    case SimilarityKind::ItemKnnCf: return "itemknn_cf";
    case SimilarityKind::ItemKnnCbf: return "itemknn_cbf";
    case SimilarityKind::PureSvd: return "puresvd";
    case SimilarityKind::Rp3Beta: return "rp3beta";
  }
  return "unknown";
}

std::string_view to_string(FeatureWeighting weighting) {
  switch (weighting) {
    case FeatureWeighting::None: return "none";
    case FeatureWeighting::TfIdf: return "tfidf";
    case FeatureWeighting::Bm25: return "bm25";
  }
  return "unknown";
}

SimilarityKind parse_similarity_kind(std::string_view text) {
  for (auto kind : {SimilarityKind::ItemKnnCf, SimilarityKind::ItemKnnCbf, SimilarityKind::PureSvd,
                    SimilarityKind::Rp3Beta}) {
    if (text == to_string(kind)) return kind;
  }
  if (text == "itemknn") return SimilarityKind::ItemKnnCf;
  throw Error(ErrorCode::ConfigInvalid, "unknown model kind '" + std::string(text) + "'");
}

FeatureWeighting parse_feature_weighting(std::string_view text) {
  for (auto w : {FeatureWeighting::None, FeatureWeighting::TfIdf, FeatureWeighting::Bm25}) {
    if (text == to_string(w)) return w;
  }
  throw Error(ErrorCode::ConfigInvalid, "unknown weighting '" + std::string(text) + "'");
}

SimilarityModel cosine_knn(const SparseMatrix& vectors, std::size_t top_k, double shrink, bool normalize,
                           SimilarityKind kind) {
  if (top_k == 0) throw Error(ErrorCode::InvalidArgument, "top_k must be >= 1");
  if (!(shrink >= 0.0)) throw Error(ErrorCode::InvalidArgument, "shrink must be >= 0");

  SparseMatrix dots = drop_diagonal(matmul(vectors, transpose(vectors)));
  if (normalize) {
    std::vector<double> norms(vectors.n_rows(), 0.0);
    for (std::size_t r = 0; r < vectors.n_rows(); ++r) {
      double acc = 0.0;
      for (double v : vectors.row(r).values) acc += v * v;
      norms[r] = std::sqrt(acc);
    }
    std::vector<Triplet> scaled;
    scaled.reserve(dots.nnz());
    for (const auto& t : dots.triplets()) {
      scaled.push_back({t.row, t.col, t.value / (norms[t.row] * norms[t.col] + shrink)});
    }
    dots = SparseMatrix::from_triplets(dots.n_rows(), dots.n_cols(), scaled);
  }

  SimilarityModel model;
  model.kind = kind;
  model.s = top_k_per_row(dots, top_k);
  model.params.top_k = top_k;
  model.params.shrink = shrink;
  model.params.normalize = normalize;
  return model;
}

SparseMatrix apply_feature_weighting(const SparseMatrix& icm, FeatureWeighting scheme) {
  if (scheme == FeatureWeighting::None) return icm;

  const auto df = column_counts(icm);
  const double n_items = static_cast<double>(icm.n_rows());
  std::vector<Triplet> weighted;
  weighted.reserve(icm.nnz());

  if (scheme == FeatureWeighting::TfIdf) {
    for (const auto& t : icm.triplets()) {
      weighted.push_back({t.row, t.col, std::log(n_items / static_cast<double>(df[t.col]))});
    }
  } else {
    const double avg_len = n_items > 0 ? static_cast<double>(icm.nnz()) / n_items : 0.0;
    for (const auto& t : icm.triplets()) {
      const double d = static_cast<double>(df[t.col]);
      const double idf = std::log((n_items - d + 0.5) / (d + 0.5) + 1.0);
      const double len = static_cast<double>(icm.row(t.row).size());
      const double tf = (kBm25K1 + 1.0) / (1.0 + kBm25K1 * (1.0 - kBm25B + kBm25B * len / avg_len));
      weighted.push_back({t.row, t.col, idf * tf});
    }
  }
  return SparseMatrix::from_triplets(icm.n_rows(), icm.n_cols(), weighted);
}

FeatureWeights tfidf_feature_scores(const SparseMatrix& icm) {
  const auto df = column_counts(icm);
  const double n_items = static_cast<double>(icm.n_rows());
  FeatureWeights out;
  out.w.resize(icm.n_cols(), 0.0);
  for (std::size_t f = 0; f < df.size(); ++f) {
    if (df[f] > 0) out.w[f] = std::log(n_items / static_cast<double>(df[f]));
  }
  return out;
}

SimilarityModel item_knn_cf(const SparseMatrix& urm, std::size_t top_k, double shrink, bool normalize,
                            FeatureWeighting weighting) {
  SparseMatrix item_vectors = transpose(urm);
  if (weighting != FeatureWeighting::None) item_vectors = apply_feature_weighting(binarize(item_vectors), weighting);
  auto model = cosine_knn(item_vectors, top_k, shrink, normalize, SimilarityKind::ItemKnnCf);
  model.params.weighting = weighting;
  return model;
}

SimilarityModel item_knn_cbf(const SparseMatrix& icm, std::size_t top_k, double shrink, bool normalize,
                             FeatureWeighting weighting) {
  auto model = cosine_knn(apply_feature_weighting(icm, weighting), top_k, shrink, normalize,
                          SimilarityKind::ItemKnnCbf);
  model.params.weighting = weighting;
  return model;
}

SparseMatrix rp3beta_transition(const SparseMatrix& urm, double alpha, double beta) {
  if (!(alpha >= 0.0) || !(beta >= 0.0)) throw Error(ErrorCode::InvalidArgument, "alpha and beta must be >= 0");
  SparseMatrix user_to_item = elementwise_pow(row_normalize(urm, Norm::L1), alpha);
  SparseMatrix item_to_user = elementwise_pow(row_normalize(transpose(urm), Norm::L1), alpha);
  SparseMatrix walk = matmul(item_to_user, user_to_item);

  const auto popularity = column_counts(urm);
  std::vector<double> factors(popularity.size(), 1.0);
  for (std::size_t j = 0; j < popularity.size(); ++j) {
    if (popularity[j] > 0) factors[j] = std::pow(static_cast<double>(popularity[j]), -beta);
  }
  return scale_columns(walk, factors);
}

SimilarityModel rp3beta(const SparseMatrix& urm, double alpha, double beta, std::size_t top_k, bool normalize) {
  if (top_k == 0) throw Error(ErrorCode::InvalidArgument, "top_k must be >= 1");
  SparseMatrix s = top_k_per_row(drop_diagonal(rp3beta_transition(urm, alpha, beta)), top_k);
  if (normalize) s = row_normalize(s, Norm::L1);

  SimilarityModel model;
  model.kind = SimilarityKind::Rp3Beta;
  model.s = std::move(s);
  model.params.alpha = alpha;
  model.params.beta = beta;
  model.params.top_k = top_k;
  model.params.normalize = normalize;
  return model;
}

RankedLists score_and_rank(const SparseMatrix& similarity, const SparseMatrix& profiles, std::size_t cutoff,
                           bool exclude_seen, const std::optional<std::vector<std::size_t>>& candidates,
                           std::size_t workers) {
  if (similarity.n_rows() != similarity.n_cols() || profiles.n_cols() != similarity.n_rows()) {
    throw Error(ErrorCode::DimensionMismatch, "score_and_rank: profiles and similarity disagree on items");
  }
  const std::size_t n_items = similarity.n_cols();
  std::vector<std::size_t> pool;
  if (candidates) {
    pool = *candidates;
    std::sort(pool.begin(), pool.end());
    pool.erase(std::unique(pool.begin(), pool.end()), pool.end());
    if (!pool.empty() && pool.back() >= n_items) throw Error(ErrorCode::IndexOutOfRange, "candidate item");
  } else {
    pool.resize(n_items);
    std::iota(pool.begin(), pool.end(), std::size_t{0});
  }

  RankedLists lists(profiles.n_rows());
  parallel_for(profiles.n_rows(), workers, [&](std::size_t u) {
    std::vector<double> scores(n_items, 0.0);
    auto profile = profiles.row(u);
    // Same accumulation order as matmul(profiles, similarity).
    for (std::size_t k = 0; k < profile.size(); ++k) {
      auto neighbours = similarity.row(profile.cols[k]);
      for (std::size_t n = 0; n < neighbours.size(); ++n) {
        scores[neighbours.cols[n]] += profile.values[k] * neighbours.values[n];
      }
    }
    std::vector<std::size_t> eligible;
    eligible.reserve(pool.size());
    for (std::size_t item : pool) {
      if (exclude_seen && std::binary_search(profile.cols.begin(), profile.cols.end(), static_cast<Index>(item))) {
        continue;
      }
      eligible.push_back(item);
    }
    const std::size_t length = std::min(cutoff, eligible.size());
    auto better = [&](std::size_t a, std::size_t b) {
      if (scores[a] != scores[b]) return scores[a] > scores[b];
      return a < b;
    };
    std::partial_sort(eligible.begin(), eligible.begin() + static_cast<std::ptrdiff_t>(length), eligible.end(),
                      better);
    eligible.resize(length);
    lists[u] = std::move(eligible);
  });
  return lists;
}

std::string params_to_json(SimilarityKind kind, const SimilarityParams& p) {
  nlohmann::ordered_json j;
  j["kind"] = std::string(to_string(kind));
  if (p.top_k) j["topK"] = *p.top_k;
  if (p.shrink) j["shrink"] = *p.shrink;
  if (p.normalize) j["normalize"] = *p.normalize;
  if (p.weighting) j["weighting"] = std::string(to_string(*p.weighting));
  if (p.num_factors) j["num_factors"] = *p.num_factors;
  if (p.alpha) j["alpha"] = *p.alpha;
  if (p.beta) j["beta"] = *p.beta;
  if (p.seed) j["seed"] = *p.seed;
  return j.dump(2) + "\n";
}

void save_model(const std::filesystem::path& stem, const SimilarityModel& model) {
  auto coo = stem;
  coo += ".coo";
  auto sidecar = stem;
  sidecar += ".json";
  write_coo(coo, model.s);
  write_file_atomic(sidecar, params_to_json(model.kind, model.params));
}

SimilarityModel load_model(const std::filesystem::path& stem) {
  auto coo = stem;
  coo += ".coo";
  auto sidecar = stem;
  sidecar += ".json";
  SimilarityModel model;
  model.s = read_coo(coo);
  try {
    auto j = nlohmann::json::parse(read_text_file(sidecar));
    model.kind = parse_similarity_kind(j.at("kind").get<std::string>());
    auto& p = model.params;
    if (j.contains("topK")) p.top_k = j["topK"].get<std::size_t>();
    if (j.contains("shrink")) p.shrink = j["shrink"].get<double>();
    if (j.contains("normalize")) p.normalize = j["normalize"].get<bool>();
    if (j.contains("weighting")) p.weighting = parse_feature_weighting(j["weighting"].get<std::string>());
    if (j.contains("num_factors")) p.num_factors = j["num_factors"].get<std::size_t>();
    if (j.contains("alpha")) p.alpha = j["alpha"].get<double>();
    if (j.contains("beta")) p.beta = j["beta"].get<double>();
    if (j.contains("seed")) p.seed = j["seed"].get<std::uint64_t>();
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::ParseError, sidecar.string() + ": " + e.what());
  }
  return model;
}

}  // namespace cqfs
