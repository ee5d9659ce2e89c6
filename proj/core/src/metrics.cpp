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

#include "cqfs/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <unordered_map>
#include <unordered_set>

#include <json.hpp>

#include "cqfs/error.hpp"
#include "cqfs/io.hpp"
#include "cqfs/random.hpp"

namespace cqfs {
namespace {

std::size_t overlap(const std::vector<std::size_t>& a, const std::vector<std::size_t>& b, std::size_t cutoff) {
  const std::size_t la = std::min(a.size(), cutoff);
  const std::size_t lb = std::min(b.size(), cutoff);
  std::size_t common = 0;
  for (std::size_t i = 0; i < la; ++i) {
    for (std::size_t j = 0; j < lb; ++j) {
      if (a[i] == b[j]) {
        ++common;
        break;
      }
    }
  }
  return common;
}

// Linear pair index -> (u, v) with u < v, row-major over the upper triangle.
std::pair<std::size_t, std::size_t> pair_at(std::size_t index, std::size_t n) {
  std::size_t u = 0;
  std::size_t row_len = n - 1;
  while (index >= row_len) {
    index -= row_len;
    ++u;
    --row_len;
  }
  return {u, u + 1 + index};
}

}  // namespace

AccuracyMetrics accuracy_metrics(const RankedLists& recommended, const std::vector<std::vector<std::size_t>>& relevant,
                                 std::size_t cutoff) {
  if (recommended.size() != relevant.size()) {
    throw Error(ErrorCode::DimensionMismatch, "recommended and relevant disagree on the number of users");
  }
  if (cutoff == 0) throw Error(ErrorCode::InvalidArgument, "cutoff must be >= 1");
  AccuracyMetrics out;
  for (std::size_t u = 0; u < recommended.size(); ++u) {
    if (relevant[u].empty()) continue;
    const std::unordered_set<std::size_t> truth(relevant[u].begin(), relevant[u].end());
    const std::size_t length = std::min(cutoff, recommended[u].size());
    std::size_t hits = 0;
    double dcg = 0.0, ap = 0.0;
    for (std::size_t r = 0; r < length; ++r) {
      if (!truth.count(recommended[u][r])) continue;
      ++hits;
      const double rank = static_cast<double>(r + 1);
      dcg += 1.0 / std::log2(rank + 1.0);
      ap += static_cast<double>(hits) / rank;
    }
    const std::size_t ideal = std::min(cutoff, truth.size());
    double idcg = 0.0;
    for (std::size_t r = 1; r <= ideal; ++r) idcg += 1.0 / std::log2(static_cast<double>(r) + 1.0);

    out.precision += static_cast<double>(hits) / static_cast<double>(cutoff);
    out.recall += static_cast<double>(hits) / static_cast<double>(truth.size());
    out.ndcg += dcg / idcg;
    out.map += ap / static_cast<double>(ideal);
    ++out.n_users_evaluated;
  }
  if (out.n_users_evaluated > 0) {
    const double n = static_cast<double>(out.n_users_evaluated);
    out.precision /= n;
    out.recall /= n;
    out.ndcg /= n;
    out.map /= n;
  }
  return out;
}

double item_coverage(const RankedLists& recommended, std::size_t n_items) {
  if (n_items == 0) throw Error(ErrorCode::InvalidArgument, "n_items must be >= 1");
  std::vector<bool> seen(n_items, false);
  std::size_t distinct = 0;
  for (const auto& list : recommended) {
    for (auto item : list) {
      if (item >= n_items) throw Error(ErrorCode::IndexOutOfRange, "recommended item outside catalog");
      if (!seen[item]) {
        seen[item] = true;
        ++distinct;
      }
    }
  }
  return static_cast<double>(distinct) / static_cast<double>(n_items);
}

double gini_diversity(const RankedLists& recommended, std::size_t n_items) {
  if (n_items < 2) throw Error(ErrorCode::DegenerateCatalog, "Gini diversity needs at least two items");
  std::vector<double> counts(n_items, 0.0);
  double total = 0.0;
  for (const auto& list : recommended) {
    for (auto item : list) {
      if (item >= n_items) throw Error(ErrorCode::IndexOutOfRange, "recommended item outside catalog");
      counts[item] += 1.0;
      total += 1.0;
    }
  }
  if (total == 0.0) throw Error(ErrorCode::InvalidArgument, "Gini diversity needs at least one recommendation");
  std::sort(counts.begin(), counts.end());
  const double n = static_cast<double>(n_items);
  double gini = 0.0;
  for (std::size_t i = 0; i < n_items; ++i) {
    gini += (2.0 * static_cast<double>(i + 1) - n - 1.0) * (counts[i] / total);
  }
  gini /= n - 1.0;
  return 1.0 - gini;
}

double mean_inter_list(const RankedLists& recommended, std::size_t cutoff, std::size_t max_pairs, std::uint64_t seed,
                       MilMode mode) {
  if (cutoff == 0) throw Error(ErrorCode::InvalidArgument, "cutoff must be >= 1");
  const std::size_t n = recommended.size();
  if (n < 2) return 0.0;
  const std::size_t total_pairs = n * (n - 1) / 2;
  auto distance = [&](std::size_t u, std::size_t v) {
    return 1.0 - static_cast<double>(overlap(recommended[u], recommended[v], cutoff)) / static_cast<double>(cutoff);
  };

  const bool exact = mode == MilMode::Exact || (mode == MilMode::Auto && total_pairs <= max_pairs) ||
                     (mode == MilMode::Sampled && max_pairs >= total_pairs);
  double sum = 0.0;
  if (exact) {
    for (std::size_t u = 0; u < n; ++u) {
      for (std::size_t v = u + 1; v < n; ++v) sum += distance(u, v);
    }
    return sum / static_cast<double>(total_pairs);
  }
  if (max_pairs == 0) throw Error(ErrorCode::InvalidArgument, "sampled MIL needs max_pairs >= 1");
  Rng rng(seed);
  auto picks = rng.sample_without_replacement(total_pairs, max_pairs);
  // Summing in index order makes the result independent of draw order.
  std::sort(picks.begin(), picks.end());
  for (auto index : picks) {
    auto [u, v] = pair_at(index, n);
    sum += distance(u, v);
  }
  return sum / static_cast<double>(picks.size());
}

std::string EvalReport::to_json() const {
  nlohmann::ordered_json j;
  j["cutoff"] = cutoff;
  j["precision"] = precision;
  j["recall"] = recall;
  j["ndcg"] = ndcg;
  j["map"] = map;
  j["item_coverage"] = item_coverage;
  j["gini_diversity"] = gini_diversity;
  j["mil"] = mil;
  j["n_users_evaluated"] = n_users_evaluated;
  return j.dump(2) + "\n";
}

std::string EvalReport::tsv_header() {
  return "model\tcutoff\tprecision\trecall\tndcg\tmap\titem_coverage\tgini_diversity\tmil\tn_users\n";
}

std::string EvalReport::to_tsv_row(const std::string& label) const {
  return label + '\t' + std::to_string(cutoff) + '\t' + format_real(precision) + '\t' + format_real(recall) + '\t' +
         format_real(ndcg) + '\t' + format_real(map) + '\t' + format_real(item_coverage) + '\t' +
         format_real(gini_diversity) + '\t' + format_real(mil) + '\t' + std::to_string(n_users_evaluated) + '\n';
}

EvalReport evaluate_lists(const RankedLists& recommended, const std::vector<std::vector<std::size_t>>& relevant,
                          const std::vector<std::size_t>& catalog, std::size_t cutoff, std::uint64_t seed,
                          std::size_t mil_max_pairs) {
  std::unordered_map<std::size_t, std::size_t> position;
  for (std::size_t k = 0; k < catalog.size(); ++k) position.emplace(catalog[k], k);
  const std::size_t n_items = catalog.size();

  RankedLists evaluated;
  std::vector<std::vector<std::size_t>> evaluated_truth;
  for (std::size_t u = 0; u < recommended.size(); ++u) {
    if (relevant.at(u).empty()) continue;
    std::vector<std::size_t> list;
    for (std::size_t r = 0; r < std::min(cutoff, recommended[u].size()); ++r) {
      auto it = position.find(recommended[u][r]);
      if (it == position.end()) throw Error(ErrorCode::IndexOutOfRange, "recommended item outside catalog");
      list.push_back(it->second);
    }
    evaluated.push_back(std::move(list));
    std::vector<std::size_t> truth;
    for (auto item : relevant[u]) {
      auto it = position.find(item);
      // Relevant items outside the catalog cannot be hit; they still count
      // towards recall.
      truth.push_back(it == position.end() ? n_items + truth.size() : it->second);
    }
    evaluated_truth.push_back(std::move(truth));
  }

  EvalReport report;
  report.cutoff = cutoff;
  const auto acc = accuracy_metrics(evaluated, evaluated_truth, cutoff);
  report.precision = acc.precision;
  report.recall = acc.recall;
  report.ndcg = acc.ndcg;
  report.map = acc.map;
  report.n_users_evaluated = acc.n_users_evaluated;
  report.item_coverage = n_items > 0 ? item_coverage(evaluated, n_items) : 0.0;
  const bool any = std::any_of(evaluated.begin(), evaluated.end(), [](const auto& l) { return !l.empty(); });
  report.gini_diversity = any && n_items >= 2 ? gini_diversity(evaluated, n_items) : 0.0;
  report.mil = mean_inter_list(evaluated, cutoff, mil_max_pairs, seed);
  return report;
}

std::vector<std::vector<std::size_t>> relevant_sets(const SparseMatrix& m) {
  std::vector<std::vector<std::size_t>> out(m.n_rows());
  for (std::size_t u = 0; u < m.n_rows(); ++u) {
    auto row = m.row(u);
    out[u].assign(row.cols.begin(), row.cols.end());
  }
  return out;
}

}  // namespace cqfs
