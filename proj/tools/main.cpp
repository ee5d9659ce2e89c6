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

// cqfs: command line front end for the feature-selection pipeline.

#include <exception>
#include <iostream>

#include <CLI11.hpp>

#include "commands.hpp"

namespace {

using namespace cqfs;
using namespace cqfs::cli;

void add_common(CLI::App* cmd, CommonOptions& common) {
  cmd->add_option("--config", common.config, "JSON experiment config")->check(CLI::ExistingFile);
  cmd->add_option("--seed", common.seed, "Master seed");
  cmd->add_option("--out", common.out, "Output directory");
  cmd->add_option("--workers", common.workers, "Worker threads (0 = all cores)");
  cmd->add_option("--solver", common.solver, "QUBO solver")->check(CLI::IsMember({"exhaustive", "sa"}));
  cmd->add_option("--samples", common.samples, "Simulated annealing samples")->check(CLI::PositiveNumber);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Collaborative-driven feature selection for cold-start recommendation"};
  app.require_subcommand(1);

  CommonOptions common;
  SynthOptions synth;
  QuboOptions qubo;
  std::optional<std::filesystem::path> qubo_path, selection_path, model_path;
  std::vector<std::filesystem::path> selection_files;

  auto* synth_cmd = app.add_subcommand("synth", "Generate a planted synthetic dataset");
  add_common(synth_cmd, common);
  synth_cmd->add_option("--users", synth.users);
  synth_cmd->add_option("--items", synth.items);
  synth_cmd->add_option("--features", synth.features);
  synth_cmd->add_option("--relevant", synth.relevant, "Number of planted features");
  synth_cmd->add_option("--interactions", synth.interactions, "Interactions per user");
  synth_cmd->add_option("--noise", synth.noise);
  synth_cmd->add_option("--extra-features", synth.extra_features, "Mean extra features per item");

  auto* prepare_cmd = app.add_subcommand("prepare", "Load, preprocess and split the dataset");
  add_common(prepare_cmd, common);

  auto* cf_cmd = app.add_subcommand("train-cf", "Tune and fit the collaborative model");
  add_common(cf_cmd, common);

  auto* qubo_cmd = app.add_subcommand("build-qubo", "Build the feature-selection QUBO for one configuration");
  add_common(qubo_cmd, common);
  qubo_cmd->add_option("--alpha", qubo.alpha);
  qubo_cmd->add_option("--beta", qubo.beta);
  qubo_cmd->add_option("--s", qubo.s, "Combination penalty strength");
  qubo_cmd->add_option("--p", qubo.p, "Fraction of features to keep");

  auto* select_cmd = app.add_subcommand("select", "Solve a QUBO and write the feature selection");
  add_common(select_cmd, common);
  select_cmd->add_option("--qubo", qubo_path, "QUBO path stem (without .coo/.json)");

  auto* cbf_cmd = app.add_subcommand("train-cbf", "Tune and fit the content model on selected features");
  add_common(cbf_cmd, common);
  cbf_cmd->add_option("--selection", selection_path, "Selection JSON")->check(CLI::ExistingFile);

  auto* eval_cmd = app.add_subcommand("evaluate", "Evaluate a content model on the cold test items");
  add_common(eval_cmd, common);
  eval_cmd->add_option("--model", model_path, "Model path stem (without .coo/.json)");

  auto* pipeline_cmd = app.add_subcommand("pipeline", "Run every stage end to end");
  add_common(pipeline_cmd, common);

  auto* stats_cmd = app.add_subcommand("stats", "Per-feature selection frequencies");
  add_common(stats_cmd, common);
  stats_cmd->add_option("selections", selection_files, "Selection JSON files (default: the grid selections)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kOk : kConfigError;
  }

  try {
    const ExperimentConfig cfg = resolve_config(common);
    if (synth_cmd->parsed()) {
      synth.seed = common.seed;
      run_synth(cfg, synth);
    } else if (prepare_cmd->parsed()) {
      run_prepare(cfg);
    } else if (cf_cmd->parsed()) {
      run_train_cf(cfg);
    } else if (qubo_cmd->parsed()) {
      run_build_qubo(cfg, qubo);
    } else if (select_cmd->parsed()) {
      run_select(cfg, qubo_path);
    } else if (cbf_cmd->parsed()) {
      run_train_cbf(cfg, selection_path);
    } else if (eval_cmd->parsed()) {
      run_evaluate(cfg, model_path);
    } else if (pipeline_cmd->parsed()) {
      run_full_pipeline(cfg);
    } else if (stats_cmd->parsed()) {
      run_stats(cfg, selection_files);
    }
  } catch (const Error& e) {
    std::cerr << "error [" << to_string(e.code()) << "]: " << e.what() << "\n";
    return exit_code_for(e.code());
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kFailure;
  }
  return kOk;
}
