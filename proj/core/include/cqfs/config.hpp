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
#include <vector>

#include "cqfs/builder.hpp"
#include "cqfs/dataio.hpp"
#include "cqfs/recmodels.hpp"
#include "cqfs/search.hpp"
#include "cqfs/solvers.hpp"

namespace cqfs {

/// Interactions/ICM files, or a planted synthetic dataset when `synth` is set.
struct DatasetSource {
  std::optional<std::filesystem::path> interactions;
  std::optional<std::filesystem::path> item_features;
  ValueMode value_mode = ValueMode::Explicit;
  std::optional<SynthConfig> synth;
};

struct SplitConfig {
  double test_quota = kDefaultTestQuota;
  double validation_quota = kDefaultValidationQuota;
  double holdout_quota = kDefaultHoldoutQuota;
};

struct ModelSearchConfig {
  SimilarityKind kind = SimilarityKind::ItemKnnCf;
  std::size_t n_cases = 50;
  SearchSpace space;
};

/// Fixed ItemKNN hyperparameters.
struct KnnParams {
  std::size_t top_k = 100;
  double shrink = 0.0;
  bool normalize = true;
  FeatureWeighting weighting = FeatureWeighting::None;
};

enum class SolverChoice { Auto, Exhaustive, SimulatedAnnealing };

/// Auto solves exhaustively up to kAutoExhaustiveMaxVariables features.
inline constexpr std::size_t kAutoExhaustiveMaxVariables = 20;

struct SolverConfig {
  SolverChoice choice = SolverChoice::Auto;
  std::size_t num_samples = kDefaultNumSamples;
  std::optional<std::size_t> sweeps;
  std::optional<double> beta_start;
  std::optional<double> beta_end;
};

enum class RankingMetric { Precision, Recall, Ndcg, Map };

struct CqfsGrid {
  std::vector<double> alpha{1.0};
  std::vector<double> beta{1.0, 1e-1, 1e-2, 1e-3, 1e-4};
  std::vector<double> s{1.0, 1e1, 1e2, 1e3, 1e4};
  std::vector<double> p{0.4, 0.6, 0.8, 0.95};
  RankingMetric selection_metric = RankingMetric::Ndcg;
  /// Content model trained on each candidate selection.
  KnnParams cbf;

  /// Points in alpha, beta, s, p nesting order (p varies fastest).
  std::vector<CqfsConfig> points() const;
};

struct BaselineConfig {
  bool all_features = true;
  std::vector<double> tfidf_quotas{0.4, 0.6, 0.8, 0.95};
  bool random = true;
};

struct ExperimentConfig {
  DatasetSource dataset;
  PreprocessThresholds preprocess;
  SplitConfig split;
  ModelSearchConfig collaborative;
  KnnParams content_teacher;
  CqfsGrid cqfs;
  SolverConfig solver;
  ModelSearchConfig final_cbf{SimilarityKind::ItemKnnCbf, 50, itemknn_space()};
  BaselineConfig baselines;
  std::size_t cutoff = 10;
  std::uint64_t seed = 7;
  std::size_t workers = 0;
  std::filesystem::path output_dir = "cqfs_out";

  ExperimentConfig();

  /// Throws ConfigInvalid on any out-of-range value.
  void validate() const;
};

/// Parses the JSON config. Unknown keys and malformed values throw
/// ConfigInvalid. Relative dataset paths resolve against `base_dir`.
ExperimentConfig parse_config(const std::string& json_text, const std::filesystem::path& base_dir = {});
ExperimentConfig load_config(const std::filesystem::path& path);

/// Canonical JSON with every field spelled out. Workers and output_dir are
/// left out since they do not affect results.
std::string config_to_json(const ExperimentConfig& cfg);

/// Default search space of a model kind.
SearchSpace default_space(SimilarityKind kind);

std::string_view to_string(RankingMetric metric);
RankingMetric parse_ranking_metric(std::string_view text);
std::string_view to_string(SolverChoice choice);
SolverChoice parse_solver_choice(std::string_view text);

/// 64-bit FNV-1a.
std::uint64_t fnv1a(std::string_view bytes, std::uint64_t basis = 0xcbf29ce484222325ULL);
std::string hex_digest(std::uint64_t hash);

/// Seed for a named sub-task, so that stages draw independent streams.
std::uint64_t derive_seed(std::uint64_t seed, std::string_view tag);

}  // namespace cqfs
