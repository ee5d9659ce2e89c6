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

#include "commands.hpp"

#include <algorithm>
#include <iostream>

#include <json.hpp>

#include "cqfs/io.hpp"
#include "cqfs/parallel.hpp"
#include "cqfs/pipeline.hpp"

namespace cqfs::cli {
namespace fs = std::filesystem;
namespace {

using OrderedJson = nlohmann::ordered_json;

fs::path out_dir(const ExperimentConfig& cfg) { return cfg.output_dir; }

std::optional<IdMap> feature_labels(const ExperimentConfig& cfg, std::size_t n) {
  const fs::path path = layout::data(out_dir(cfg)) / "features.txt";
  if (!fs::exists(path)) return std::nullopt;
  Dataset ds = load_prepared_dataset(layout::data(out_dir(cfg)));
  if (ds.n_features() != n) return std::nullopt;
  return ds.features;
}

// Simple two-column key/value report.
void write_summary(const ExperimentConfig& cfg, const std::string& name, const OrderedJson& j) {
  std::string tsv = "key\tvalue\n";
  for (const auto& [key, value] : j.items()) {
    tsv += key + '\t' + (value.is_string() ? value.get<std::string>() : value.dump()) + '\n';
  }
  write_report(layout::reports(out_dir(cfg)), name, j.dump(2) + "\n", tsv);
}

}  // namespace

int exit_code_for(ErrorCode code) {
  switch (code) {
    case ErrorCode::ConfigInvalid:
    case ErrorCode::InvalidArgument:
      return kConfigError;
    case ErrorCode::ParseError:
    case ErrorCode::NegativeValue:
    case ErrorCode::EmptyDataset:
    case ErrorCode::IndexOutOfRange:
    case ErrorCode::DimensionMismatch:
    case ErrorCode::DegenerateCatalog:
    case ErrorCode::Io:
      return kDataError;
    case ErrorCode::QuotaInfeasible:
    case ErrorCode::InfeasibleConfig:
    case ErrorCode::RankTooLarge:
    case ErrorCode::TooLarge:
    case ErrorCode::NegativeBase:
      return kInfeasible;
  }
  return kFailure;
}

ExperimentConfig resolve_config(const CommonOptions& opts) {
  ExperimentConfig cfg = opts.config ? load_config(*opts.config) : ExperimentConfig{};
  if (opts.seed) cfg.seed = *opts.seed;
  if (opts.out) cfg.output_dir = *opts.out;
  if (opts.workers) cfg.workers = *opts.workers;
  if (opts.solver) cfg.solver.choice = parse_solver_choice(*opts.solver);
  if (opts.samples) cfg.solver.num_samples = *opts.samples;
  cfg.validate();
  return cfg;
}

void run_synth(const ExperimentConfig& cfg, const SynthOptions& opts) {
  SynthConfig sc = cfg.dataset.synth.value_or(SynthConfig{});
  if (opts.users) sc.n_users = *opts.users;
  if (opts.items) sc.n_items = *opts.items;
  if (opts.features) sc.n_features = *opts.features;
  if (opts.relevant) sc.n_relevant = *opts.relevant;
  if (opts.interactions) sc.interactions_per_user = *opts.interactions;
  if (opts.noise) sc.noise_rate = *opts.noise;
  if (opts.extra_features) sc.extra_features_mean = *opts.extra_features;
  if (opts.seed) sc.seed = *opts.seed;

  const PlantedDataset planted = synth_planted(sc);
  const Dataset& ds = planted.dataset;
  const fs::path data = layout::data(out_dir(cfg));
  save_dataset(data, ds);

  OrderedJson j;
  j["n_users"] = ds.n_users();
  j["n_items"] = ds.n_items();
  j["n_features"] = ds.n_features();
  j["n_interactions"] = ds.urm.nnz();
  j["icm_nnz"] = ds.icm.nnz();
  j["seed"] = sc.seed;
  std::vector<std::string> labels;
  for (std::size_t f : planted.planted) labels.push_back(ds.features.label(f));
  j["planted_features"] = labels;
  write_file_atomic(data / "planted.json", j.dump(2) + "\n");
  write_summary(cfg, "synth", j);
  std::cout << "wrote " << (data / "interactions.tsv").string() << " and " << (data / "icm.tsv").string() << "\n";
}

void run_prepare(const ExperimentConfig& cfg) {
  run_pipeline(cfg, PipelineStop::Split);
  const Dataset ds = load_prepared_dataset(layout::data(out_dir(cfg)));
  const Splits splits = load_splits(layout::split(out_dir(cfg)));
  OrderedJson j;
  j["n_users"] = ds.n_users();
  j["n_items"] = ds.n_items();
  j["n_features"] = ds.n_features();
  j["n_interactions"] = ds.urm.nnz();
  j["train_interactions"] = splits.cold.train.nnz();
  j["validation_interactions"] = splits.cold.validation.nnz();
  j["test_interactions"] = splits.cold.test.nnz();
  j["cold_validation_items"] = splits.cold.cold_validation_items.size();
  j["cold_test_items"] = splits.cold.cold_test_items.size();
  j["holdout_train_interactions"] = splits.holdout.train.nnz();
  j["holdout_validation_interactions"] = splits.holdout.validation.nnz();
  write_summary(cfg, "prepare", j);
  std::cout << "prepared " << ds.n_users() << " users, " << ds.n_items() << " items, " << ds.n_features()
            << " features\n";
}

void run_train_cf(const ExperimentConfig& cfg) {
  run_pipeline(cfg, PipelineStop::Collaborative);
  const SimilarityModel model = load_model(layout::models(out_dir(cfg)) / "cf");
  std::cout << "collaborative model: " << params_to_json(model.kind, model.params);
}

void run_build_qubo(const ExperimentConfig& cfg, const QuboOptions& opts) {
  run_pipeline(cfg, PipelineStop::ContentTeacher);
  const fs::path out = out_dir(cfg);
  const Dataset ds = load_prepared_dataset(layout::data(out));
  const Splits splits = load_splits(layout::split(out));
  const SimilarityModel cf = load_model(layout::models(out) / "cf");
  const SimilarityModel teacher = load_model(layout::models(out) / "cbf_teacher");

  CqfsConfig c;
  c.alpha = opts.alpha.value_or(cfg.cqfs.alpha.front());
  c.beta = opts.beta.value_or(cfg.cqfs.beta.front());
  c.s = opts.s.value_or(cfg.cqfs.s.front());
  c.p = opts.p.value_or(cfg.cqfs.p.front());
  try {
    c.validate();
  } catch (const Error& e) {
    throw Error(ErrorCode::ConfigInvalid, e.what());
  }
  const QuboProblem problem = build_cqfs_qubo(cf.s, teacher.s, warm_icm(ds.icm, splits.cold), c);
  save_qubo(out / "qubo" / "qubo", problem);

  OrderedJson j;
  j["n"] = problem.n();
  j["offset"] = problem.offset();
  j["alpha"] = c.alpha;
  j["beta"] = c.beta;
  j["s"] = c.s;
  j["p"] = c.p;
  j["k"] = c.p * static_cast<double>(problem.n());
  j["max_abs_coefficient"] = problem.max_abs_coefficient();
  j["min_nonzero_abs_coefficient"] = problem.min_nonzero_abs_coefficient();
  write_summary(cfg, "qubo", j);
  std::cout << "wrote QUBO over " << problem.n() << " features\n";
}

void run_select(const ExperimentConfig& cfg, const std::optional<fs::path>& qubo) {
  const fs::path out = out_dir(cfg);
  const QuboProblem problem = load_qubo(qubo.value_or(out / "qubo" / "qubo"));
  const SelectionResult result =
      solve_qubo(problem, cfg.solver, derive_seed(cfg.seed, "solver"), resolve_workers(cfg.workers));
  save_selection(out / "selection" / "selection.json", result);

  const auto labels = feature_labels(cfg, problem.n());
  OrderedJson j = OrderedJson::parse(selection_to_json(result, false));
  std::string tsv = "feature\tlabel\tselected\n";
  for (std::size_t f = 0; f < result.x.size(); ++f) {
    const std::string label = labels ? labels->label(f) : std::to_string(f);
    tsv += std::to_string(f) + '\t' + label + '\t' + std::to_string(result.x[f]) + '\n';
  }
  j["n_selected"] = result.count_selected();
  write_report(layout::reports(out), "selection", j.dump(2) + "\n", tsv);
  std::cout << "selected " << result.count_selected() << " of " << problem.n() << " features, energy "
            << format_real(result.energy) << "\n";
}

void run_train_cbf(const ExperimentConfig& cfg, const std::optional<fs::path>& selection) {
  run_pipeline(cfg, PipelineStop::Split);
  const fs::path out = out_dir(cfg);
  const Dataset ds = load_prepared_dataset(layout::data(out));
  const Splits splits = load_splits(layout::split(out));
  const SelectionResult chosen = load_selection(selection.value_or(out / "selection" / "selection.json"));
  const ContentFit fit = search_content(select_features(ds.icm, chosen.x), splits.cold, cfg);
  save_model(layout::models(out) / "cbf", fit.model);

  OrderedJson j = OrderedJson::parse(params_to_json(fit.model.kind, fit.model.params));
  j["n_selected"] = chosen.count_selected();
  j["validation_" + std::string(to_string(cfg.cqfs.selection_metric))] = fit.search.best_score();
  write_summary(cfg, "cbf", j);
  std::cout << "content model: " << params_to_json(fit.model.kind, fit.model.params);
}

void run_evaluate(const ExperimentConfig& cfg, const std::optional<fs::path>& model) {
  run_pipeline(cfg, PipelineStop::Split);
  const fs::path out = out_dir(cfg);
  const Splits splits = load_splits(layout::split(out));
  const SimilarityModel m = load_model(model.value_or(layout::models(out) / "cbf"));
  const EvalReport report = cold_test_report(m.s, splits.cold, cfg.cutoff, derive_seed(cfg.seed, "mil"),
                                             resolve_workers(cfg.workers));
  const std::string label(to_string(m.kind));
  write_report(layout::reports(out), "evaluation", report.to_json(), EvalReport::tsv_header() + report.to_tsv_row(label));
  std::cout << EvalReport::tsv_header() << report.to_tsv_row(label);
}

void run_full_pipeline(const ExperimentConfig& cfg) {
  const PipelineRun run = run_pipeline(cfg);
  for (const auto& stage : run.stages) {
    std::cout << stage.name << '\t' << (stage.executed ? "ran" : "reused") << '\t' << format_real(stage.seconds)
              << "s\n";
  }
  std::cout << "reports in " << layout::reports(out_dir(cfg)).string() << "\n";
}

void run_stats(const ExperimentConfig& cfg, const std::vector<fs::path>& selections) {
  std::vector<fs::path> files = selections;
  if (files.empty()) {
    const fs::path grid = layout::grid(out_dir(cfg));
    if (fs::is_directory(grid)) {
      for (const auto& entry : fs::directory_iterator(grid)) {
        const std::string name = entry.path().filename().string();
        if (name.size() > 15 && name.ends_with(".selection.json")) files.push_back(entry.path());
      }
    }
    std::sort(files.begin(), files.end());
  }
  if (files.empty()) throw Error(ErrorCode::Io, "no selection files given or found");

  std::vector<std::vector<std::size_t>> sets;
  std::size_t n = 0;
  for (const auto& f : files) {
    const SelectionResult r = load_selection(f);
    if (!sets.empty() && r.x.size() != n) throw Error(ErrorCode::DimensionMismatch, f.string() + ": length differs");
    n = r.x.size();
    sets.push_back(r.selected());
  }
  const auto stats = feature_selection_stats(sets, n);
  const auto labels = feature_labels(cfg, n);
  const IdMap* names = labels ? &*labels : nullptr;
  write_report(layout::reports(out_dir(cfg)), "feature_selection_stats", feature_stats_json(stats, names),
               feature_stats_tsv(stats, names));
  std::cout << feature_stats_tsv(stats, names);
}

}  // namespace cqfs::cli
