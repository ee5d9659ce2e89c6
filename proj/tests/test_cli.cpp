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

#include <cstdlib>
#include <filesystem>
#include <string>

#include <json.hpp>

#include "fixtures.hpp"

#ifndef CQFS_CLI_PATH
#error "CQFS_CLI_PATH must point at the cqfs executable"
#endif

namespace fs = std::filesystem;
using namespace cqfs;

namespace {

int run(const std::string& args) {
  const std::string cmd = std::string("\"") + CQFS_CLI_PATH + "\" " + args + " > /dev/null 2>&1";
  const int status = std::system(cmd.c_str());
  REQUIRE(status != -1);
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

std::string quoted(const fs::path& p) { return "\"" + p.string() + "\""; }

}  // namespace

TEST_CASE("cli help and usage errors", "[cli]") {
  REQUIRE(run("--help") == 0);
  REQUIRE(run("") == 2);
  REQUIRE(run("frobnicate") == 2);
  REQUIRE(run("pipeline --solver quantum") == 2);
  REQUIRE(run("pipeline --samples 0") == 2);
}

TEST_CASE("cli maps config errors to exit code 2", "[cli]") {
  const auto dir = fixture::scratch("cli_config");
  fixture::write_text(dir / "bad.json", R"({"unknown_key": 1})");
  REQUIRE(run("prepare --config " + quoted(dir / "bad.json") + " --out " + quoted(dir / "out")) == 2);
  fixture::write_text(dir / "broken.json", "{");
  REQUIRE(run("prepare --config " + quoted(dir / "broken.json") + " --out " + quoted(dir / "out")) == 2);
  fs::remove_all(dir);
}

TEST_CASE("cli maps data errors to exit code 3", "[cli]") {
  const auto dir = fixture::scratch("cli_data");
  fixture::write_text(dir / "u.tsv", "u1\ti1\t1\nline-without-an-item\n");
  fixture::write_text(dir / "f.tsv", "i1\tf1\n");
  fixture::write_text(dir / "cfg.json", R"({"dataset": {"interactions": "u.tsv", "item_features": "f.tsv"}})");
  REQUIRE(run("prepare --config " + quoted(dir / "cfg.json") + " --out " + quoted(dir / "out")) == 3);

  fixture::write_text(dir / "missing.json", R"({"dataset": {"interactions": "nope.tsv", "item_features": "f.tsv"}})");
  REQUIRE(run("prepare --config " + quoted(dir / "missing.json") + " --out " + quoted(dir / "out")) == 3);
  fs::remove_all(dir);
}

TEST_CASE("cli maps infeasible stages to exit code 4", "[cli]") {
  const auto dir = fixture::scratch("cli_infeasible");
  // one item holds nearly all interactions, so no test pool can reach its quota
  std::string urm;
  for (int u = 0; u < 20; ++u) urm += "u" + std::to_string(u) + "\ti0\t1\n";
  urm += "u0\ti1\t1\n";
  fixture::write_text(dir / "u.tsv", urm);
  fixture::write_text(dir / "f.tsv", "i0\tf0\ni1\tf1\n");
  fixture::write_text(dir / "cfg.json", R"({"dataset": {"interactions": "u.tsv", "item_features": "f.tsv"}})");
  REQUIRE(run("prepare --config " + quoted(dir / "cfg.json") + " --out " + quoted(dir / "out")) == 4);

  fixture::write_text(dir / "synth.json", R"({"dataset": {"synth": {"n_features": 4, "n_relevant": 9}}})");
  REQUIRE(run("synth --config " + quoted(dir / "synth.json") + " --out " + quoted(dir / "out2")) == 4);
  fs::remove_all(dir);
}

TEST_CASE("cli stages write their reports", "[cli]") {
  const auto dir = fixture::scratch("cli_stages");
  fixture::write_text(dir / "cfg.json", fixture::kSmallConfig);
  const std::string common = "--config " + quoted(dir / "cfg.json") + " --out " + quoted(dir / "out") + " --workers 2";
  const fs::path reports = dir / "out" / "reports";

  REQUIRE(run("synth " + common) == 0);
  REQUIRE(fs::exists(dir / "out" / "data" / "interactions.tsv"));
  REQUIRE(fs::exists(dir / "out" / "data" / "icm.tsv"));
  REQUIRE(run("prepare " + common) == 0);
  REQUIRE(run("train-cf " + common) == 0);
  REQUIRE(run("build-qubo " + common + " --p 0.5 --s 10") == 0);
  REQUIRE(run("select " + common + " --solver exhaustive") == 0);
  REQUIRE(run("train-cbf " + common) == 0);
  REQUIRE(run("evaluate " + common) == 0);
  REQUIRE(run("build-qubo " + common + " --p 1.5") == 2);
  for (const char* name : {"synth", "prepare", "qubo", "selection", "cbf", "evaluation"}) {
    INFO(name);
    REQUIRE(fs::exists(reports / (std::string(name) + ".json")));
    REQUIRE(fs::exists(reports / (std::string(name) + ".tsv")));
  }
  const auto selection = nlohmann::json::parse(fixture::slurp(reports / "selection.json"));
  std::size_t ones = 0;
  for (const auto& bit : selection.at("x")) ones += bit.get<int>();
  REQUIRE(selection.at("n_selected").get<std::size_t>() == ones);

  REQUIRE(run("pipeline " + common) == 0);
  for (const char* name : {"cf_search", "cqfs_grid", "final_cbf_search", "cqfs", "baselines", "feature_selection_stats"}) {
    INFO(name);
    REQUIRE(fs::exists(reports / (std::string(name) + ".json")));
    REQUIRE(fs::exists(reports / (std::string(name) + ".tsv")));
  }
  REQUIRE(run("stats " + common) == 0);
  REQUIRE(run("stats " + common + " " + quoted(dir / "none.json")) == 3);
  fs::remove_all(dir);
}
