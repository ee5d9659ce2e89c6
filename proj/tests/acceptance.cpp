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

// Acceptance checks: one PASS/FAIL line per criterion, non-zero exit on any
// failure.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <functional>
#include <iostream>
#include <map>
#include <sstream>
#include <string>

#include "cqfs/builder.hpp"
#include "cqfs/metrics.hpp"
#include "cqfs/pipeline.hpp"
#include "cqfs/recmodels.hpp"
#include "cqfs/solvers.hpp"
#include "fixtures.hpp"
#include "oracles.hpp"

#ifndef CQFS_CLI_PATH
#error "CQFS_CLI_PATH must point at the cqfs executable"
#endif

namespace fs = std::filesystem;
using namespace cqfs;

namespace {

struct Outcome {
  bool pass = false;
  std::string detail;
};

struct Criterion {
  std::string name;
  double budget_s;  // 0 = no runtime bound
  std::function<Outcome()> check;
};

std::string fmt(const char* pattern, double a, double b = 0.0, double c = 0.0, double d = 0.0) {
  char buf[256];
  std::snprintf(buf, sizeof(buf), pattern, a, b, c, d);
  return buf;
}

double count(const Assignment& x) {
  double c = 0.0;
  for (auto v : x) c += v;
  return c;
}

double x_f_x(const oracle::Dense& f, const Assignment& x) {
  double acc = 0.0;
  for (std::size_t a = 0; a < x.size(); ++a) {
    if (!x[a]) continue;
    for (std::size_t b = 0; b < x.size(); ++b) acc += f[a][b] * x[b];
  }
  return acc;
}

Outcome qubo_algebra() {
  Rng rng(1001);
  double worst = 0.0;
  std::size_t assignments = 0;
  for (int trial = 0; trial < 1000; ++trial) {
    const std::size_t n = 1 + rng.below(12);
    const bool integral = rng.below(2) == 0;
    const auto fpm = oracle::random_dense(n, n, rng.uniform(0.2, 1.0), rng, -5.0, 5.0, integral);
    CqfsConfig cfg;
    cfg.p = std::max(1e-3, rng.uniform());
    cfg.s = rng.uniform(0.0, 20.0);
    const auto q = assemble_qubo(oracle::sparse(fpm), cfg);
    const double k = cfg.p * static_cast<double>(n);
    for (std::uint64_t code = 0; code < (std::uint64_t{1} << n); ++code) {
      const auto x = oracle::decode(code, n);
      const double dev = count(x) - k;
      const double expected = x_f_x(fpm, x) + cfg.s * dev * dev;
      worst = std::max(worst, std::abs(energy(q, x) - expected));
      ++assignments;
    }
  }
  return {worst <= 1e-9, fmt("%.0f assignments, max |error| %.3g", static_cast<double>(assignments), worst)};
}

Outcome fpm_oracle() {
  Rng rng(1002);
  int exact = 0;
  for (int trial = 0; trial < 200; ++trial) {
    const std::size_t items = 1 + rng.below(30), features = 1 + rng.below(10);
    const auto icm = oracle::random_binary(items, features, rng.uniform(0.1, 0.6), rng);
    auto similarity = [&] {
      auto d = oracle::random_dense(items, items, rng.uniform(0.1, 0.5), rng, 0.05, 1.0, false);
      for (std::size_t i = 0; i < items; ++i) d[i][i] = 0.0;
      return oracle::sparse(d);
    };
    const double beta = std::ldexp(1.0, -static_cast<int>(rng.below(8)));
    const auto ipm = build_ipm(build_penalization(similarity(), similarity()), 1.0, beta);
    exact += oracle::dense(build_fpm(icm, ipm)) == oracle::fpm_triple_sum(oracle::dense(icm), oracle::dense(ipm));
  }
  return {exact == 200, fmt("%.0f/200 instances exact", exact)};
}

Outcome sa_quality() {
  Rng rng(1003);
  int optimal = 0, below = 0;
  for (int trial = 0; trial < 50; ++trial) {
    const auto q = oracle::random_qubo(16, rng);
    const auto exact = solve_exhaustive(q);
    const auto sa = solve_sa(q, default_schedule(q), 100, static_cast<std::uint64_t>(trial));
    optimal += sa.front().energy <= exact.energy + 1e-9;
    below += sa.front().energy < exact.energy - 1e-9;
  }
  return {optimal >= 48 && below == 0, fmt("optimum on %.0f/50, below exact on %.0f", optimal, below)};
}

Outcome cardinality() {
  Rng rng(1004);
  int hits = 0;
  for (int trial = 0; trial < 100; ++trial) {
    const std::size_t n = 2 + rng.below(13);
    const auto fpm = oracle::random_dense(n, n, rng.uniform(0.2, 1.0), rng, -3.0, 3.0, false);
    double total = 0.0;
    for (const auto& row : fpm) {
      for (double v : row) total += std::abs(v);
    }
    CqfsConfig cfg;
    double k = 0.0, frac = 0.5;
    while (std::abs(frac - 0.5) < 0.05) {
      cfg.p = std::max(1e-3, rng.uniform());
      k = cfg.p * static_cast<double>(n);
      frac = k - std::floor(k);
    }
    // gap between the nearest and second-nearest count is s * (1 - 2 * distance)
    const double distance = std::abs(k - std::round(k));
    cfg.s = (total + 1.0) / (1.0 - 2.0 * distance);
    const auto best = solve_exhaustive(assemble_qubo(oracle::sparse(fpm), cfg));
    hits += static_cast<double>(best.count_selected()) == std::round(k);
  }
  return {hits == 100, fmt("%.0f/100 optima at round(p|F|)", hits)};
}

Outcome metric_fixtures() {
  double worst = 0.0;
  auto check = [&](double got, double expected) { worst = std::max(worst, std::abs(got - expected)); };
  const auto single = accuracy_metrics({{0, 1, 2}}, {{1}}, 3);
  check(single.precision, 1.0 / 3.0);
  check(single.recall, 1.0);
  check(single.map, 0.5);
  check(single.ndcg, 1.0 / std::log2(3.0));
  const auto perfect = accuracy_metrics({{4, 2, 7}}, {{2, 4, 7}}, 3);
  check(perfect.precision + perfect.recall + perfect.map + perfect.ndcg, 4.0);
  const auto miss = accuracy_metrics({{0, 1, 2}}, {{5}}, 3);
  check(miss.precision + miss.recall + miss.map + miss.ndcg, 0.0);
  check(item_coverage({{0, 1}, {2}}, 3), 1.0);
  check(item_coverage({}, 10), 0.0);
  check(item_coverage({{0, 1}, {1, 2}}, 10), 0.3);
  check(gini_diversity({{0, 1}, {2, 3}}, 4), 1.0);
  check(gini_diversity({{0}, {0}, {0}}, 2), 0.0);
  const bool concentrates = gini_diversity({{0, 1}, {2, 3}, {0}}, 4) < gini_diversity({{0, 1}, {2, 3}}, 4);
  check(mean_inter_list({{0, 1}, {0, 1}}, 2, 100, 0), 0.0);
  check(mean_inter_list({{0, 1}, {2, 3}}, 2, 100, 0), 1.0);
  check(mean_inter_list({{0, 1}, {1, 2}, {2, 3}}, 2, 100, 0, MilMode::Exact), 2.0 / 3.0);

  Rng rng(1005);
  double mil_gap = 0.0;
  for (std::size_t users : {100u, 200u}) {
    std::vector<std::vector<std::size_t>> lists;
    for (std::size_t u = 0; u < users; ++u) lists.push_back(rng.sample_without_replacement(80, 10));
    const double exact = mean_inter_list(lists, 10, kDefaultMilMaxPairs, 1, MilMode::Exact);
    const double sampled = mean_inter_list(lists, 10, kDefaultMilMaxPairs, 2, MilMode::Sampled);
    mil_gap = std::max(mil_gap, std::abs(exact - sampled));
  }
  return {worst <= 1e-9 && concentrates && mil_gap <= 0.02,
          fmt("max fixture error %.3g, MIL exact vs sampled gap %.4f", worst, mil_gap)};
}

struct PlantedSeed {
  double recovery = 0.0;
  double random_recovery = 0.0;
  double ndcg = 0.0;
  double random_ndcg = 0.0;
  std::size_t selected = 0;
};

double recovered(const std::vector<std::size_t>& selected, const std::vector<std::size_t>& planted) {
  std::size_t hit = 0;
  for (std::size_t f : selected) hit += std::binary_search(planted.begin(), planted.end(), f);
  return static_cast<double>(hit) / static_cast<double>(planted.size());
}

PlantedSeed planted_seed(std::uint64_t seed) {
  ExperimentConfig cfg;
  SynthConfig sc;
  sc.seed = seed;
  cfg.dataset.synth = sc;
  cfg.seed = seed;
  cfg.workers = 0;
  cfg.cqfs.p = {0.2};
  // only penalty-dominant points, so every selection has exactly p * |F| features
  std::vector<double> strong;
  for (double s : cfg.cqfs.s) {
    if (s >= 1000.0) strong.push_back(s);
  }
  cfg.cqfs.s = strong;
  cfg.content_teacher.top_k = 10;

  const PlantedDataset planted = synth_planted(sc);
  const Dataset& ds = planted.dataset;
  const Splits splits = make_splits(ds, cfg);
  const auto cf = item_knn_cf(splits.cold.train, 10, 10.0, true);
  const auto teacher = fit_content(warm_icm(ds.icm, splits.cold), cfg.content_teacher);
  const GridOutcome grid = run_cqfs_grid(cf, teacher, ds.icm, splits.cold, cfg);

  PlantedSeed out;
  const auto chosen = grid.winner().selection.selected();
  out.selected = chosen.size();
  const auto random = baseline_random_selection(
      ds.n_features(), static_cast<double>(chosen.size()) / static_cast<double>(ds.n_features()),
      derive_seed(seed, "random_baseline"));
  out.recovery = recovered(chosen, planted.planted);
  out.random_recovery = recovered(random, planted.planted);
  const auto mil_seed = derive_seed(seed, "mil");
  auto ndcg_of = [&](const std::vector<std::size_t>& features) {
    const auto model = fit_content(select_features(ds.icm, indicator(ds.n_features(), features)), cfg.cqfs.cbf);
    return cold_test_report(model.s, splits.cold, cfg.cutoff, mil_seed, 1).ndcg;
  };
  out.ndcg = ndcg_of(chosen);
  out.random_ndcg = ndcg_of(random);
  return out;
}

Outcome planted_recovery() {
  double recovery = 0.0, random_recovery = 0.0;
  int wins = 0;
  std::ostringstream per_seed;
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    const PlantedSeed r = planted_seed(seed);
    recovery += r.recovery / 10.0;
    random_recovery += r.random_recovery / 10.0;
    wins += r.ndcg > r.random_ndcg;
    per_seed << "    seed " << seed << ": selected " << r.selected << ", recovery " << r.recovery << " (random "
             << r.random_recovery << "), ndcg " << r.ndcg << " (random " << r.random_ndcg << ")\n";
  }
  std::cout << per_seed.str();
  const bool pass = recovery >= 0.8 && recovery - random_recovery >= 0.3 && wins >= 8;
  return {pass, fmt("recovery %.3f vs random %.3f, NDCG wins %.0f/10", recovery, random_recovery, wins)};
}

Outcome model_oracles() {
  Rng rng(1007);
  double value_error = 0.0, svd_error = 0.0;
  int ranking_mismatch = 0;
  auto track = [&](const SparseMatrix& got, const oracle::Dense& expected) {
    const auto d = oracle::dense(got);
    for (std::size_t r = 0; r < d.size(); ++r) {
      for (std::size_t c = 0; c < d[r].size(); ++c) value_error = std::max(value_error, std::abs(d[r][c] - expected[r][c]));
    }
  };
  for (int trial = 0; trial < 50; ++trial) {
    const std::size_t rows = 2 + rng.below(19), cols = 2 + rng.below(19);
    const auto v = oracle::random_dense(rows, cols, 0.4, rng, 0.0, 1.0, false);
    const std::size_t k = 1 + rng.below(rows);
    const double shrink = rng.below(2) ? 0.0 : rng.uniform(0.0, 10.0);
    const bool normalize = rng.below(2) == 1;
    track(cosine_knn(oracle::sparse(v), k, shrink, normalize).s, oracle::cosine(v, k, shrink, normalize));

    const auto urm = oracle::random_dense(rows, cols, 0.4, rng, 1.0, 5.0, true);
    track(rp3beta(oracle::sparse(urm), 1.0, 0.0, cols, false).s, oracle::rp3beta(urm, 1.0, 0.0, cols, false));

    const auto s = oracle::random_dense(cols, cols, 0.5, rng, 0.0, 1.0, false);
    std::vector<std::size_t> all(cols);
    for (std::size_t i = 0; i < cols; ++i) all[i] = i;
    const bool exclude = rng.below(2) == 1;
    ranking_mismatch +=
        score_and_rank(oracle::sparse(s), oracle::sparse(urm), 10, exclude) != oracle::rank(s, urm, 10, exclude, all);

    const std::size_t tall = std::max(rows, cols), narrow = std::min(rows, cols);
    const auto r = oracle::random_dense(tall, narrow, 0.8, rng, -2.0, 2.0, false);
    const auto svd = truncated_svd(oracle::sparse(r), narrow, static_cast<std::uint64_t>(trial));
    oracle::Dense rebuilt = oracle::zeros(tall, narrow);
    for (std::size_t i = 0; i < tall; ++i) {
      for (std::size_t j = 0; j < narrow; ++j) {
        for (std::size_t f = 0; f < narrow; ++f) rebuilt[i][j] += svd.u(i, f) * svd.sigma[f] * svd.v(j, f);
      }
    }
    const auto reference = oracle::jacobi_svd(r);
    oracle::Dense reference_rebuilt = oracle::zeros(tall, narrow);
    for (std::size_t i = 0; i < tall; ++i) {
      for (std::size_t j = 0; j < narrow; ++j) {
        for (std::size_t f = 0; f < narrow; ++f) {
          reference_rebuilt[i][j] += reference.u[i][f] * reference.sigma[f] * reference.v[j][f];
        }
      }
    }
    svd_error = std::max({svd_error, oracle::frobenius_distance(rebuilt, r),
                          oracle::frobenius_distance(rebuilt, reference_rebuilt)});
  }
  return {value_error <= 1e-9 && ranking_mismatch == 0 && svd_error <= 1e-8,
          fmt("max value error %.3g, ranking mismatches %.0f, SVD Frobenius error %.3g", value_error,
              ranking_mismatch, svd_error)};
}

Outcome determinism() {
  const fs::path root = fs::temp_directory_path() / "cqfs_acceptance_determinism";
  fs::remove_all(root);
  fs::create_directories(root);
  fixture::write_text(root / "config.json", fixture::kSmallConfig);
  std::map<std::string, std::string> reports[2];
  for (int run = 0; run < 2; ++run) {
    const fs::path out = root / ("run" + std::to_string(run));
    const std::string cmd = std::string("\"") + CQFS_CLI_PATH + "\" pipeline --config \"" +
                            (root / "config.json").string() + "\" --out \"" + out.string() + "\" --workers " +
                            (run == 0 ? "1" : "4") + " > /dev/null 2>&1";
    if (std::system(cmd.c_str()) != 0) return {false, "pipeline run " + std::to_string(run) + " failed"};
    for (const auto& entry : fs::directory_iterator(out / "reports")) {
      reports[run][entry.path().filename().string()] = fixture::slurp(entry.path());
    }
  }
  const bool same = !reports[0].empty() && reports[0] == reports[1];
  fs::remove_all(root);
  return {same, std::to_string(reports[0].size()) + " report files " + (same ? "identical" : "differ")};
}

}  // namespace

int main() {
  const std::vector<Criterion> criteria{
      {"qubo_algebra", 30.0, qubo_algebra},
      {"fpm_oracle", 5.0, fpm_oracle},
      {"sa_quality", 60.0, sa_quality},
      {"cardinality_control", 0.0, cardinality},
      {"metric_fixtures", 0.0, metric_fixtures},
      {"planted_recovery", 300.0, planted_recovery},
      {"model_oracles", 0.0, model_oracles},
      {"determinism", 0.0, determinism},
  };
  int failures = 0;
  for (const auto& c : criteria) {
    const auto start = std::chrono::steady_clock::now();
    Outcome outcome;
    try {
      outcome = c.check();
    } catch (const std::exception& e) {
      outcome = {false, std::string("threw: ") + e.what()};
    }
    const double seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    bool pass = outcome.pass;
    std::string detail = outcome.detail;
    if (c.budget_s > 0.0 && seconds > c.budget_s) {
      pass = false;
      detail += fmt(", over the %.0f s budget", c.budget_s);
    }
    failures += !pass;
    std::cout << (pass ? "PASS " : "FAIL ") << c.name << ": " << detail << fmt(" (%.2f s)", seconds) << std::endl;
  }
  return failures == 0 ? 0 : 1;
}
