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

#include <catch_amalgamated.hpp>

#include <filesystem>

#include <json.hpp>

#include "cqfs/config.hpp"
#include "cqfs/error.hpp"

using namespace cqfs;

namespace {

ErrorCode parse_error(const std::string& text) {
  try {
    parse_config(text);
  } catch (const Error& e) {
    return e.code();
  }
  FAIL("expected a config error for " << text);
  return ErrorCode::Io;
}

}  // namespace

TEST_CASE("empty config yields the defaults", "[config]") {
  auto cfg = parse_config("{}");
  REQUIRE(cfg.seed == 7);
  REQUIRE(cfg.cutoff == 10);
  REQUIRE(cfg.dataset.synth.has_value());
  REQUIRE(cfg.cqfs.alpha == std::vector<double>{1.0});
  REQUIRE(cfg.cqfs.beta.size() == 5);
  REQUIRE(cfg.cqfs.s.size() == 5);
  REQUIRE(cfg.cqfs.p == std::vector<double>{0.4, 0.6, 0.8, 0.95});
  REQUIRE(cfg.cqfs.points().size() == 100);
  REQUIRE(cfg.collaborative.n_cases == 50);
  REQUIRE(cfg.final_cbf.kind == SimilarityKind::ItemKnnCbf);
  REQUIRE(cfg.solver.num_samples == 100);
}

TEST_CASE("grid points nest with p fastest", "[config]") {
  CqfsGrid grid;
  grid.alpha = {1.0};
  grid.beta = {0.1, 0.2};
  grid.s = {1.0};
  grid.p = {0.5, 0.7};
  auto pts = grid.points();
  REQUIRE(pts.size() == 4);
  REQUIRE(pts[0].beta == 0.1);
  REQUIRE(pts[0].p == 0.5);
  REQUIRE(pts[1].p == 0.7);
  REQUIRE(pts[2].beta == 0.2);
}

TEST_CASE("unknown keys are rejected", "[config]") {
  REQUIRE(parse_error(R"({"sed": 3})") == ErrorCode::ConfigInvalid);
  REQUIRE(parse_error(R"({"cqfs": {"gamma": [1]}})") == ErrorCode::ConfigInvalid);
  REQUIRE(parse_error(R"({"dataset": {"synth": {"users": 3}}})") == ErrorCode::ConfigInvalid);
}

TEST_CASE("malformed values are rejected", "[config]") {
  REQUIRE(parse_error("not json") == ErrorCode::ConfigInvalid);
  REQUIRE(parse_error(R"({"cqfs": {"p": [1.5]}})") == ErrorCode::ConfigInvalid);
  REQUIRE(parse_error(R"({"cqfs": {"p": []}})") == ErrorCode::ConfigInvalid);
  REQUIRE(parse_error(R"({"seed": "seven"})") == ErrorCode::ConfigInvalid);
  REQUIRE(parse_error(R"({"solver": {"kind": "quantum"}})") == ErrorCode::ConfigInvalid);
  REQUIRE(parse_error(R"({"collaborative": {"kind": "itemknn_cbf"}})") == ErrorCode::ConfigInvalid);
  REQUIRE(parse_error(R"({"collaborative": {"n_cases": 0}})") == ErrorCode::ConfigInvalid);
  REQUIRE(parse_error(R"({"cutoff": 0})") == ErrorCode::ConfigInvalid);
  REQUIRE(parse_error(R"({"split": {"test_quota": 0.7, "validation_quota": 0.4}})") == ErrorCode::ConfigInvalid);
}

TEST_CASE("config survives a canonical round trip", "[config]") {
  auto cfg = parse_config(R"({
    "dataset": {"synth": {"n_users": 50, "n_items": 40, "n_features": 10, "n_relevant": 3, "seed": 4}},
    "collaborative": {"kind": "rp3beta", "n_cases": 5},
    "content_teacher": {"topK": 20, "shrink": 3, "weighting": "bm25"},
    "cqfs": {"beta": [0.01], "s": [10, 100], "p": [0.5], "selection_metric": "precision"},
    "solver": {"kind": "sa", "num_samples": 20, "sweeps": 300},
    "final_cbf": {"n_cases": 4, "space": {"topK": {"distribution": "uniform_int", "low": 5, "high": 50}}},
    "baselines": {"tfidf_quotas": [0.5], "random": false},
    "cutoff": 5,
    "seed": 11,
    "workers": 2,
    "output_dir": "somewhere"
  })");
  REQUIRE(cfg.collaborative.kind == SimilarityKind::Rp3Beta);
  REQUIRE(cfg.content_teacher.top_k == 20);
  REQUIRE(cfg.content_teacher.weighting == FeatureWeighting::Bm25);
  REQUIRE(cfg.solver.choice == SolverChoice::SimulatedAnnealing);
  REQUIRE(cfg.solver.sweeps == 300u);
  REQUIRE(cfg.cqfs.selection_metric == RankingMetric::Precision);
  REQUIRE(cfg.final_cbf.space.find("topK")->high == 50);
  REQUIRE(cfg.final_cbf.space.find("shrink") != nullptr);
  REQUIRE(cfg.dataset.synth->n_users == 50);
  REQUIRE(cfg.workers == 2);

  const std::string canonical = config_to_json(cfg);
  auto again = parse_config(canonical);
  REQUIRE(config_to_json(again) == canonical);
  REQUIRE(canonical.find("somewhere") == std::string::npos);
  REQUIRE(nlohmann::json::parse(canonical).contains("cqfs"));
}

TEST_CASE("file datasets resolve against the config directory", "[config]") {
  auto dir = std::filesystem::temp_directory_path() / "cqfs_config_paths";
  std::filesystem::create_directories(dir);
  auto cfg = parse_config(R"({"dataset": {"interactions": "u.tsv", "item_features": "f.tsv", "value_mode": "implicit"}})",
                          dir);
  REQUIRE(!cfg.dataset.synth.has_value());
  REQUIRE(*cfg.dataset.interactions == dir / "u.tsv");
  REQUIRE(cfg.dataset.value_mode == ValueMode::ImplicitBinary);
  REQUIRE(parse_error(R"({"dataset": {"interactions": "u.tsv"}})") == ErrorCode::ConfigInvalid);
  std::filesystem::remove_all(dir);
}

TEST_CASE("seed derivation and hashing", "[config]") {
  REQUIRE(fnv1a("") == 0xcbf29ce484222325ULL);
  REQUIRE(fnv1a("a") == 0xaf63dc4c8601ec8cULL);
  REQUIRE(hex_digest(0xabcULL) == "0000000000000abc");
  REQUIRE(derive_seed(7, "solver") == derive_seed(7, "solver"));
  REQUIRE(derive_seed(7, "solver") != derive_seed(7, "mil"));
  REQUIRE(derive_seed(7, "solver") != derive_seed(8, "solver"));
  REQUIRE(parse_ranking_metric(to_string(RankingMetric::Map)) == RankingMetric::Map);
  REQUIRE(parse_solver_choice("exhaustive") == SolverChoice::Exhaustive);
  REQUIRE(default_space(SimilarityKind::PureSvd).find("num_factors") != nullptr);
}
