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
#include "cqfs/config.hpp"
#include "cqfs/dataio.hpp"
#include "cqfs/metrics.hpp"
#include "cqfs/qubo.hpp"
#include "cqfs/recmodels.hpp"
#include "cqfs/search.hpp"
#include "cqfs/solvers.hpp"

namespace cqfs {

/// Cold-item split plus the per-user holdout of its warm train part, on
/// which the collaborative model is tuned.
struct Splits {
  ColdSplit cold;
  HoldoutSplit holdout;
};

/// Synthetic or file-backed dataset after preprocessing.
Dataset acquire_dataset(const ExperimentConfig& cfg);

Splits make_splits(const Dataset& ds, const ExperimentConfig& cfg);

/// Rows of cold items emptied, so content similarities only link warm items.
SparseMatrix warm_icm(const SparseMatrix& icm, const ColdSplit& split);

/// Keeps the columns whose bit is set.
SparseMatrix select_features(const SparseMatrix& icm, const Assignment& x);
Assignment indicator(std::size_t n, const std::vector<std::size_t>& features);

SimilarityModel fit_collaborative(SimilarityKind kind, const SparseMatrix& urm, const ParamPoint& point,
                                  std::uint64_t seed);
SimilarityModel fit_content(const SparseMatrix& icm, const ParamPoint& point);
SimilarityModel fit_content(const SparseMatrix& icm, const KnnParams& params);
ParamPoint to_point(const KnnParams& params);

double ranking_metric(const AccuracyMetrics& m, RankingMetric metric);

/// Recommends cold validation items to the train profiles.
double cold_validation_score(const SparseMatrix& similarity, const ColdSplit& split, std::size_t cutoff,
                             RankingMetric metric, std::size_t workers = 1);

/// Recommends cold test items to the train + validation profiles.
EvalReport cold_test_report(const SparseMatrix& similarity, const ColdSplit& split, std::size_t cutoff,
                            std::uint64_t seed, std::size_t workers = 1);

struct CollaborativeFit {
  SimilarityModel model;
  SearchResult search;
};

/// Random search on the warm holdout (precision at the cutoff), then a refit
/// of the winner on the full warm train.
CollaborativeFit search_collaborative(const Splits& splits, const ExperimentConfig& cfg);

/// Exhaustive or SA per the config. When no coefficient is positive the
/// all-ones assignment is a global minimum and is returned directly.
SelectionResult solve_qubo(const QuboProblem& problem, const SolverConfig& solver, std::uint64_t seed,
                           std::size_t workers = 1);

struct GridPoint {
  CqfsConfig cqfs;
  /// Empty when the point was loaded from a previous run.
  QuboProblem problem;
  SelectionResult selection;
  double validation_score = 0.0;
};

struct GridOutcome {
  std::vector<GridPoint> points;
  std::size_t best = 0;

  const GridPoint& winner() const { return points.at(best); }
};

/// Builds, solves and scores every grid point. `icm` is the full ICM; the
/// QUBO sees only its warm rows. Ties resolve to the earlier point.
GridOutcome run_cqfs_grid(const SimilarityModel& collaborative, const SimilarityModel& content_teacher,
                          const SparseMatrix& icm, const ColdSplit& split, const ExperimentConfig& cfg);

struct ContentFit {
  SimilarityModel model;
  SearchResult search;
};

/// Random search over the final content model space on cold validation.
ContentFit search_content(const SparseMatrix& icm, const ColdSplit& split, const ExperimentConfig& cfg);

/// Top ceil(quota * n_features) features by TF-IDF score, ties to the smaller
/// index. Returned sorted.
std::vector<std::size_t> baseline_tfidf_selection(const SparseMatrix& icm, double quota);

/// ceil(quota * n_features) distinct features drawn uniformly. Returned sorted.
std::vector<std::size_t> baseline_random_selection(std::size_t n_features, double quota, std::uint64_t seed);

struct FeatureFrequency {
  std::size_t feature = 0;
  std::size_t count = 0;
  double frequency = 0.0;
};

/// How often each feature appears across `selections`, most frequent first
/// (ties by index). With no selections every frequency is 0.
std::vector<FeatureFrequency> feature_selection_stats(const std::vector<std::vector<std::size_t>>& selections,
                                                      std::size_t n_features);
std::string feature_stats_tsv(const std::vector<FeatureFrequency>& stats, const IdMap* labels = nullptr);
std::string feature_stats_json(const std::vector<FeatureFrequency>& stats, const IdMap* labels = nullptr);

struct StageRecord {
  std::string name;
  std::string key;
  bool executed = false;
  double seconds = 0.0;
  std::vector<std::filesystem::path> artifacts;
};

struct PipelineRun {
  std::string config_hash;
  std::filesystem::path output_dir;
  std::vector<StageRecord> stages;

  const StageRecord* stage(std::string_view name) const;
  std::string to_json() const;
};

enum class PipelineStop { Data, Split, Collaborative, ContentTeacher, Grid, Final, All };

/// Runs the stages in order up to `stop`. A stage whose stamp matches its
/// input hash and whose artifacts all exist is loaded from disk instead of
/// recomputed; once any stage runs, every later one runs too.
PipelineRun run_pipeline(const ExperimentConfig& cfg, PipelineStop stop = PipelineStop::All);

/// Layout of the output directory.
namespace layout {
inline std::filesystem::path data(const std::filesystem::path& out) { return out / "data"; }
inline std::filesystem::path split(const std::filesystem::path& out) { return out / "split"; }
inline std::filesystem::path models(const std::filesystem::path& out) { return out / "models"; }
inline std::filesystem::path grid(const std::filesystem::path& out) { return out / "grid"; }
inline std::filesystem::path reports(const std::filesystem::path& out) { return out / "reports"; }
inline std::filesystem::path stamps(const std::filesystem::path& out) { return out / "stamps"; }
}  // namespace layout

/// Dataset matrices and labels as written by the data stage.
void save_prepared_dataset(const std::filesystem::path& dir, const Dataset& ds);
Dataset load_prepared_dataset(const std::filesystem::path& dir);
void save_splits(const std::filesystem::path& dir, const Splits& splits);
Splits load_splits(const std::filesystem::path& dir);

/// JSON and TSV side by side under `reports`: <name>.json and <name>.tsv.
void write_report(const std::filesystem::path& reports, const std::string& name, const std::string& json,
                  const std::string& tsv);

}  // namespace cqfs
