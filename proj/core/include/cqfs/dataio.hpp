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
#include <optional>
#include <string>
#include <unordered_map>
#include <vector>

#include "cqfs/sparse.hpp"

namespace cqfs {

/// Bijection between original labels and dense indices 0..n-1.
class IdMap {
 public:
  /// Index of `label`, appending it if unseen.
  std::size_t intern(const std::string& label);
  std::optional<std::size_t> find(const std::string& label) const;
  const std::string& label(std::size_t index) const { return labels_.at(index); }
  std::size_t size() const { return labels_.size(); }
  const std::vector<std::string>& labels() const { return labels_; }

  static IdMap from_labels(std::vector<std::string> labels);

  bool operator==(const IdMap& other) const { return labels_ == other.labels_; }

 private:
  std::vector<std::string> labels_;
  std::unordered_map<std::string, std::size_t> index_;
};

/// Interaction matrix (users x items, values > 0) plus binary item content
/// matrix (items x features).
struct Dataset {
  SparseMatrix urm;
  SparseMatrix icm;
  IdMap users;
  IdMap items;
  IdMap features;

  std::size_t n_users() const { return urm.n_rows(); }
  std::size_t n_items() const { return urm.n_cols(); }
  std::size_t n_features() const { return icm.n_cols(); }

  /// Throws InvalidArgument if any invariant is broken.
  void validate() const;
};

enum class ValueMode { Explicit, ImplicitBinary };

struct RawInteraction {
  std::string user;
  std::string item;
  double value = 1.0;
};

struct RawItemFeature {
  std::string item;
  std::string feature;
};

/// TSV `user<TAB>item[<TAB>value]`; blank and `#` lines are skipped.
/// Throws ParseError (with line number) and NegativeValue.
std::vector<RawInteraction> load_interactions(std::istream& in, ValueMode mode);
std::vector<RawInteraction> load_interactions(const std::filesystem::path& path, ValueMode mode);

/// TSV `item<TAB>feature`.
std::vector<RawItemFeature> load_item_features(std::istream& in);
std::vector<RawItemFeature> load_item_features(const std::filesystem::path& path);

/// Builds index maps and matrices. Items that only appear in the feature file
/// become interaction-free columns. Duplicate interactions are summed
/// (ImplicitBinary clamps them back to 1); duplicate item-feature pairs
/// collapse to a single 1.
Dataset make_dataset(const std::vector<RawInteraction>& interactions,
                     const std::vector<RawItemFeature>& features, ValueMode mode = ValueMode::Explicit);

Dataset load_dataset(const std::filesystem::path& interactions, const std::filesystem::path& item_features,
                     ValueMode mode);

void save_dataset(const std::filesystem::path& dir, const Dataset& ds);

struct PreprocessThresholds {
  std::size_t min_user_interactions = 0;
  std::size_t min_item_interactions = 0;
  std::size_t min_feature_items = 0;
};

/// Drops users, items and features below the thresholds, repeating until
/// nothing changes, then re-indexes densely in original order.
/// Throws EmptyDataset when no user or no item survives.
Dataset preprocess(const Dataset& ds, const PreprocessThresholds& thresholds);

/// Item-wise split: test and validation columns hold cold items, train holds
/// the warm ones. The three matrices partition the input entrywise.
struct ColdSplit {
  SparseMatrix train;
  SparseMatrix validation;
  SparseMatrix test;
  std::vector<std::size_t> cold_validation_items;
  std::vector<std::size_t> cold_test_items;
  std::uint64_t seed = 0;
  double test_quota = 0.0;
  double validation_quota = 0.0;

  std::vector<std::size_t> warm_items() const;
};

inline constexpr double kDefaultTestQuota = 0.20;
inline constexpr double kDefaultValidationQuota = 0.10;
inline constexpr double kDefaultHoldoutQuota = 0.10;

/// Draws items uniformly without replacement into the test pool until it holds
/// at least test_quota of all interactions, then into the validation pool
/// until it holds validation_quota more. The item that crosses a threshold
/// stays in its pool. Throws QuotaInfeasible / InvalidArgument.
ColdSplit cold_item_split(const SparseMatrix& urm, double test_quota, double validation_quota,
                          std::uint64_t seed);

struct HoldoutSplit {
  SparseMatrix train;
  SparseMatrix validation;
};

/// Moves floor(quota * n_u) uniformly chosen interactions of every user u to
/// validation.
HoldoutSplit user_holdout_split(const SparseMatrix& m, double quota, std::uint64_t seed);

void save_cold_split(const std::filesystem::path& dir, const ColdSplit& split);
ColdSplit load_cold_split(const std::filesystem::path& dir);

struct SynthConfig {
  std::size_t n_users = 200;
  std::size_t n_items = 150;
  std::size_t n_features = 40;
  std::size_t n_relevant = 8;
  std::size_t interactions_per_user = 30;
  double noise_rate = 0.1;
  /// Mean number of extra (non-planted) features per item.
  double extra_features_mean = 2.0;
  std::uint64_t seed = 7;
};

struct PlantedDataset {
  Dataset dataset;
  /// Sorted indices of the planted (relevant) features.
  std::vector<std::size_t> planted;
  /// Planted feature assigned to each user / carried by each item.
  std::vector<std::size_t> user_preference;
  std::vector<std::size_t> item_relevant;
};

/// Synthetic dataset whose interactions are explained by a known feature
/// subset. Every item carries exactly one planted feature plus a Poisson
/// number of extra features; every user prefers one planted feature and draws
/// interactions from items carrying it, except for a noise_rate share drawn
/// uniformly over all items. Repeated draws of an item accumulate into the
/// interaction value. Throws InfeasibleConfig.
PlantedDataset synth_planted(const SynthConfig& cfg);

}  // namespace cqfs
