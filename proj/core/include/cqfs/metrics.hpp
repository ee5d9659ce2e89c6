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
#include <string>
#include <vector>

#include "cqfs/recmodels.hpp"

namespace cqfs {

struct AccuracyMetrics {
  double precision = 0.0;
  double recall = 0.0;
  double ndcg = 0.0;
  double map = 0.0;
  std::size_t n_users_evaluated = 0;
};

/// Macro-averaged binary-relevance metrics at `cutoff`. Users whose relevant
/// set is empty are skipped. Lists longer than `cutoff` are truncated.
AccuracyMetrics accuracy_metrics(const RankedLists& recommended, const std::vector<std::vector<std::size_t>>& relevant,
                                 std::size_t cutoff);

/// Share of the catalog recommended to at least one user.
double item_coverage(const RankedLists& recommended, std::size_t n_items);

/// 1 - Gini coefficient of the per-item recommendation counts over the whole
/// catalog (never-recommended items count as zeros). Throws
/// DegenerateCatalog for n_items < 2, InvalidArgument with no
/// recommendations at all.
double gini_diversity(const RankedLists& recommended, std::size_t n_items);

enum class MilMode { Auto, Exact, Sampled };

/// Mean over user pairs of 1 - |L_u & L_v| / cutoff. Auto enumerates every
/// pair when there are at most max_pairs of them, otherwise draws max_pairs
/// distinct pairs uniformly with `seed`. Sampled always samples (all pairs
/// when max_pairs covers them). Returns 0 with fewer than two users.
double mean_inter_list(const RankedLists& recommended, std::size_t cutoff, std::size_t max_pairs,
                       std::uint64_t seed, MilMode mode = MilMode::Auto);

inline constexpr std::size_t kDefaultMilMaxPairs = 10000;

struct EvalReport {
  std::size_t cutoff = 10;
  double precision = 0.0;
  double recall = 0.0;
  double ndcg = 0.0;
  double map = 0.0;
  double item_coverage = 0.0;
  double gini_diversity = 0.0;
  double mil = 0.0;
  std::size_t n_users_evaluated = 0;

  std::string to_json() const;
  static std::string tsv_header();
  std::string to_tsv_row(const std::string& label) const;
};

/// Full report for lists drawn from `catalog` (the candidate item ids; the
/// beyond-accuracy metrics are relative to it). Only users with a non-empty
/// relevant set take part, in every metric.
EvalReport evaluate_lists(const RankedLists& recommended, const std::vector<std::vector<std::size_t>>& relevant,
                          const std::vector<std::size_t>& catalog, std::size_t cutoff, std::uint64_t seed,
                          std::size_t mil_max_pairs = kDefaultMilMaxPairs);

/// Relevant item sets per user from the stored entries of `m`.
std::vector<std::vector<std::size_t>> relevant_sets(const SparseMatrix& m);

}  // namespace cqfs
