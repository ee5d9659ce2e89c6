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

#include "cqfs/pipeline.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <fstream>
#include <numeric>
#include <sstream>

#include <json.hpp>

#include "cqfs/error.hpp"
#include "cqfs/io.hpp"
#include "cqfs/parallel.hpp"

namespace cqfs {
namespace fs = std::filesystem;
namespace {

using Json = nlohmann::json;
using OrderedJson = nlohmann::ordered_json;
using Clock = std::chrono::steady_clock;

std::size_t quota_count(std::size_t n, double quota) {
  if (!(quota > 0.0 && quota <= 1.0)) throw Error(ErrorCode::InvalidArgument, "quota must be in (0, 1]");
  // The epsilon keeps products such as 0.6 * 10 from rounding up past 6.
  return static_cast<std::size_t>(std::ceil(quota * static_cast<double>(n) - 1e-9));
}

std::vector<std::size_t> random_subset(std::size_t n, std::size_t count, std::uint64_t seed) {
  Rng rng(seed);
  auto picked = rng.sample_without_replacement(n, count);
  std::sort(picked.begin(), picked.end());
  return picked;
}

void write_lines(const fs::path& path, const std::vector<std::string>& lines) {
  std::string text;
  for (const auto& line : lines) text += line + '\n';
  write_file_atomic(path, text);
}

std::vector<std::string> read_lines(const fs::path& path) {
  std::istringstream in(read_text_file(path));
  std::vector<std::string> lines;
  for (std::string line; std::getline(in, line);) lines.push_back(line);
  return lines;
}

Json parse_json(const fs::path& path) {
  try {
    return Json::parse(read_text_file(path));
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::ParseError, path.string() + ": " + e.what());
  }
}

Json point_to_json(const ParamPoint& point) {
  Json j = Json::object();
  for (const auto& [name, value] : point) j[name] = std::visit([](const auto& v) { return Json(v); }, value);
  return j;
}

std::pair<std::string, std::string> search_report(const SearchResult& search, SimilarityKind kind,
                                                  const std::string& score_name) {
  OrderedJson j;
  j["kind"] = std::string(to_string(kind));
  j["objective"] = score_name;
  j["best_case"] = search.best_index;
  j["best_score"] = search.best_score();
  j["cases"] = Json::array();
  std::string tsv = "case\t" + score_name + "\tparams\n";
  for (std::size_t c = 0; c < search.cases.size(); ++c) {
    OrderedJson row;
    row["params"] = point_to_json(search.cases[c]);
    row["score"] = search.scores[c];
    j["cases"].push_back(row);
    tsv += std::to_string(c) + '\t' + format_real(search.scores[c]) + '\t' + to_string(search.cases[c]) + '\n';
  }
  return {j.dump(2) + "\n", tsv};
}

Json model_params_json(const SimilarityModel& model) { return Json::parse(params_to_json(model.kind, model.params)); }

std::vector<std::string> feature_labels(const std::vector<std::size_t>& features, const IdMap& labels) {
  std::vector<std::string> out;
  for (std::size_t f : features) out.push_back(labels.label(f));
  return out;
}

std::string stem_name(std::size_t index) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "point_%03zu", index);
  return buf;
}

// Runs or reuses one stage and records it.
class StageGraph {
 public:
  StageGraph(fs::path out, PipelineRun& run) : out_(std::move(out)), run_(run) {}

  template <class Compute, class Load>
  void stage(const std::string& name, const std::string& key, std::vector<fs::path> artifacts, Compute compute,
             Load load) {
    StageRecord record;
    record.name = name;
    record.key = key;
    record.artifacts = std::move(artifacts);
    const auto start = Clock::now();
    const fs::path stamp = layout::stamps(out_) / (name + ".key");

    bool reuse = !dirty_ && fs::exists(stamp) && read_text_file(stamp) == key + "\n";
    for (const auto& a : record.artifacts) reuse = reuse && fs::exists(a);
    if (reuse) {
      load();
    } else {
      std::error_code ignored;
      fs::remove(stamp, ignored);
      compute();
      write_file_atomic(stamp, key + "\n");
      record.executed = true;
      dirty_ = true;
    }
    record.seconds = std::chrono::duration<double>(Clock::now() - start).count();
    run_.stages.push_back(std::move(record));
  }

 private:
  fs::path out_;
  PipelineRun& run_;
  bool dirty_ = false;
};

std::string stage_key(const std::string& name, std::initializer_list<std::string> inputs) {
  std::string material = name;
  for (const auto& in : inputs) material += "\n" + in;
  return hex_digest(fnv1a(material));
}

struct Evaluated {
  std::string label;
  std::vector<std::size_t> features;
  ContentFit fit;
  EvalReport report;
};

Evaluated evaluate_selection(const std::string& label, const std::vector<std::size_t>& features, const Dataset& ds,
                             const ColdSplit& split, const ExperimentConfig& cfg) {
  Evaluated out;
  out.label = label;
  out.features = features;
  const SparseMatrix icm = select_features(ds.icm, indicator(ds.n_features(), features));
  out.fit = search_content(icm, split, cfg);
  out.report = cold_test_report(out.fit.model.s, split, cfg.cutoff, derive_seed(cfg.seed, "mil"), cfg.workers);
  return out;
}

OrderedJson evaluated_json(const Evaluated& e, const IdMap& labels, const std::string& score_name) {
  OrderedJson j;
  j["model"] = e.label;
  j["n_selected"] = e.features.size();
  j["selected_features"] = feature_labels(e.features, labels);
  j["cbf"] = model_params_json(e.fit.model);
  j["validation_" + score_name] = e.fit.search.best_score();
  j["test"] = OrderedJson::parse(e.report.to_json());
  return j;
}

}  // namespace

Dataset acquire_dataset(const ExperimentConfig& cfg) {
  Dataset ds;
  if (cfg.dataset.synth) {
    ds = synth_planted(*cfg.dataset.synth).dataset;
  } else {
    ds = load_dataset(*cfg.dataset.interactions, *cfg.dataset.item_features, cfg.dataset.value_mode);
  }
  return preprocess(ds, cfg.preprocess);
}

Splits make_splits(const Dataset& ds, const ExperimentConfig& cfg) {
  Splits out;
  out.cold = cold_item_split(ds.urm, cfg.split.test_quota, cfg.split.validation_quota,
                             derive_seed(cfg.seed, "cold_split"));
  out.holdout = user_holdout_split(out.cold.train, cfg.split.holdout_quota, derive_seed(cfg.seed, "holdout"));
  return out;
}

SparseMatrix warm_icm(const SparseMatrix& icm, const ColdSplit& split) {
  std::vector<bool> keep(icm.n_rows(), true);
  for (const auto* pool : {&split.cold_test_items, &split.cold_validation_items}) {
    for (std::size_t i : *pool) {
      if (i >= keep.size()) throw Error(ErrorCode::IndexOutOfRange, "cold item " + std::to_string(i));
      keep[i] = false;
    }
  }
  return mask_rows(icm, keep);
}

SparseMatrix select_features(const SparseMatrix& icm, const Assignment& x) {
  if (x.size() != icm.n_cols()) throw Error(ErrorCode::DimensionMismatch, "selection length differs from ICM width");
  std::vector<bool> keep(x.size());
  for (std::size_t f = 0; f < x.size(); ++f) keep[f] = x[f] != 0;
  return mask_columns(icm, keep);
}

Assignment indicator(std::size_t n, const std::vector<std::size_t>& features) {
  Assignment x(n, 0);
  for (std::size_t f : features) x.at(f) = 1;
  return x;
}

SimilarityModel fit_collaborative(SimilarityKind kind, const SparseMatrix& urm, const ParamPoint& point,
                                  std::uint64_t seed) {
  switch (kind) {
    case SimilarityKind::ItemKnnCf:
      return item_knn_cf(urm, static_cast<std::size_t>(get_int(point, "topK")), get_real(point, "shrink"),
                         get_bool(point, "normalize"), parse_feature_weighting(get_string(point, "weighting")));
    case SimilarityKind::PureSvd: {
      const auto max_rank = std::min(urm.n_rows(), urm.n_cols());
      const auto factors = std::min<std::size_t>(static_cast<std::size_t>(get_int(point, "num_factors")), max_rank);
      return pure_svd(urm, std::max<std::size_t>(factors, 1), seed);
    }
    case SimilarityKind::Rp3Beta:
      return rp3beta(urm, get_real(point, "alpha"), get_real(point, "beta"),
                     static_cast<std::size_t>(get_int(point, "topK")), get_bool(point, "normalize"));
    case SimilarityKind::ItemKnnCbf:
      break;
  }
  throw Error(ErrorCode::ConfigInvalid, "itemknn_cbf is not a collaborative model");
}

SimilarityModel fit_content(const SparseMatrix& icm, const ParamPoint& point) {
  return item_knn_cbf(icm, static_cast<std::size_t>(get_int(point, "topK")), get_real(point, "shrink"),
                      get_bool(point, "normalize"), parse_feature_weighting(get_string(point, "weighting")));
}

SimilarityModel fit_content(const SparseMatrix& icm, const KnnParams& params) {
  return item_knn_cbf(icm, params.top_k, params.shrink, params.normalize, params.weighting);
}

ParamPoint to_point(const KnnParams& params) {
  return {{"topK", static_cast<std::int64_t>(params.top_k)},
          {"shrink", params.shrink},
          {"normalize", params.normalize},
          {"weighting", std::string(to_string(params.weighting))}};
}

double ranking_metric(const AccuracyMetrics& m, RankingMetric metric) {
  switch (metric) {
    case RankingMetric::Precision: return m.precision;
    case RankingMetric::Recall: return m.recall;
    case RankingMetric::Ndcg: return m.ndcg;
    case RankingMetric::Map: return m.map;
  }
  return 0.0;
}

double cold_validation_score(const SparseMatrix& similarity, const ColdSplit& split, std::size_t cutoff,
                             RankingMetric metric, std::size_t workers) {
  const auto lists = score_and_rank(similarity, split.train, cutoff, true, split.cold_validation_items, workers);
  return ranking_metric(accuracy_metrics(lists, relevant_sets(split.validation), cutoff), metric);
}

EvalReport cold_test_report(const SparseMatrix& similarity, const ColdSplit& split, std::size_t cutoff,
                            std::uint64_t seed, std::size_t workers) {
  const SparseMatrix profiles = add(split.train, split.validation);
  const auto lists = score_and_rank(similarity, profiles, cutoff, true, split.cold_test_items, workers);
  return evaluate_lists(lists, relevant_sets(split.test), split.cold_test_items, cutoff, seed);
}

CollaborativeFit search_collaborative(const Splits& splits, const ExperimentConfig& cfg) {
  const auto& holdout = splits.holdout;
  const auto warm = splits.cold.warm_items();
  const auto relevant = relevant_sets(holdout.validation);
  const auto kind = cfg.collaborative.kind;
  const auto model_seed = derive_seed(cfg.seed, "collaborative_model");

  auto objective = [&](const ParamPoint& point) {
    const auto model = fit_collaborative(kind, holdout.train, point, model_seed);
    const auto lists = score_and_rank(model.s, holdout.train, cfg.cutoff, true, warm, 1);
    return accuracy_metrics(lists, relevant, cfg.cutoff).precision;
  };
  CollaborativeFit out;
  out.search = random_search(cfg.collaborative.space, cfg.collaborative.n_cases, objective,
                             derive_seed(cfg.seed, "collaborative_search"), resolve_workers(cfg.workers));
  out.model = fit_collaborative(kind, splits.cold.train, out.search.best(), model_seed);
  return out;
}

SelectionResult solve_qubo(const QuboProblem& problem, const SolverConfig& solver, std::uint64_t seed,
                           std::size_t workers) {
  const std::size_t n = problem.n();
  if (n == 0) throw Error(ErrorCode::InfeasibleConfig, "no features left to select from");

  SolverKind kind = SolverKind::SimulatedAnnealing;
  if (solver.choice == SolverChoice::Exhaustive ||
      (solver.choice == SolverChoice::Auto && n <= kAutoExhaustiveMaxVariables)) {
    kind = SolverKind::Exhaustive;
  }

  const auto& q = problem.q().data;
  if (std::all_of(q.begin(), q.end(), [](double v) { return v <= 0.0; })) {
    SelectionResult r;
    r.x.assign(n, 1);
    r.energy = energy(problem, r.x);
    r.solver = kind;
    r.seed = seed;
    r.samples_drawn = 0;
    return r;
  }

  if (kind == SolverKind::Exhaustive) {
    SelectionResult r = solve_exhaustive(problem);
    r.seed = seed;
    return r;
  }
  AnnealSchedule schedule = default_schedule(problem);
  if (solver.sweeps) schedule.sweeps = *solver.sweeps;
  if (solver.beta_start) schedule.beta_start = *solver.beta_start;
  if (solver.beta_end) schedule.beta_end = *solver.beta_end;
  schedule.beta_end = std::max(schedule.beta_end, schedule.beta_start);
  return solve_sa(problem, schedule, solver.num_samples, seed, workers).front();
}

GridOutcome run_cqfs_grid(const SimilarityModel& collaborative, const SimilarityModel& content_teacher,
                          const SparseMatrix& icm, const ColdSplit& split, const ExperimentConfig& cfg) {
  const auto configs = cfg.cqfs.points();
  const SparseMatrix icm_warm = warm_icm(icm, split);
  const PenalizationMatrices pm = build_penalization(collaborative, content_teacher);
  const auto solver_seed = derive_seed(cfg.seed, "solver");

  GridOutcome out;
  out.points.resize(configs.size());
  parallel_for(configs.size(), resolve_workers(cfg.workers), [&](std::size_t i) {
    GridPoint& point = out.points[i];
    point.cqfs = configs[i];
    const SparseMatrix fpm = build_fpm(icm_warm, build_ipm(pm, point.cqfs.alpha, point.cqfs.beta));
    point.problem = assemble_qubo(fpm, point.cqfs);
    point.selection = solve_qubo(point.problem, cfg.solver, solver_seed, 1);
    const auto cbf = fit_content(select_features(icm, point.selection.x), cfg.cqfs.cbf);
    point.validation_score = cold_validation_score(cbf.s, split, cfg.cutoff, cfg.cqfs.selection_metric, 1);
  });

  for (std::size_t i = 1; i < out.points.size(); ++i) {
    const double score = out.points[i].validation_score, best = out.points[out.best].validation_score;
    if (score > best || (std::isnan(best) && !std::isnan(score))) out.best = i;
  }
  return out;
}

ContentFit search_content(const SparseMatrix& icm, const ColdSplit& split, const ExperimentConfig& cfg) {
  auto objective = [&](const ParamPoint& point) {
    return cold_validation_score(fit_content(icm, point).s, split, cfg.cutoff, cfg.cqfs.selection_metric, 1);
  };
  ContentFit out;
  out.search = random_search(cfg.final_cbf.space, cfg.final_cbf.n_cases, objective,
                             derive_seed(cfg.seed, "content_search"), resolve_workers(cfg.workers));
  out.model = fit_content(icm, out.search.best());
  return out;
}

std::vector<std::size_t> baseline_tfidf_selection(const SparseMatrix& icm, double quota) {
  const std::size_t count = quota_count(icm.n_cols(), quota);
  const auto scores = tfidf_feature_scores(icm).w;
  std::vector<std::size_t> order(scores.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return scores[a] > scores[b]; });
  order.resize(count);
  std::sort(order.begin(), order.end());
  return order;
}

std::vector<std::size_t> baseline_random_selection(std::size_t n_features, double quota, std::uint64_t seed) {
  return random_subset(n_features, quota_count(n_features, quota), seed);
}

std::vector<FeatureFrequency> feature_selection_stats(const std::vector<std::vector<std::size_t>>& selections,
                                                      std::size_t n_features) {
  std::vector<FeatureFrequency> stats(n_features);
  for (std::size_t f = 0; f < n_features; ++f) stats[f].feature = f;
  for (const auto& selection : selections) {
    for (std::size_t f : selection) {
      if (f >= n_features) throw Error(ErrorCode::IndexOutOfRange, "selected feature " + std::to_string(f));
      ++stats[f].count;
    }
  }
  for (auto& s : stats) {
    s.frequency = selections.empty() ? 0.0 : static_cast<double>(s.count) / static_cast<double>(selections.size());
  }
  std::stable_sort(stats.begin(), stats.end(),
                   [](const FeatureFrequency& a, const FeatureFrequency& b) { return a.count > b.count; });
  return stats;
}

std::string feature_stats_tsv(const std::vector<FeatureFrequency>& stats, const IdMap* labels) {
  std::string out = "feature\tlabel\tcount\tfrequency\n";
  for (const auto& s : stats) {
    const std::string label = labels ? labels->label(s.feature) : std::to_string(s.feature);
    out += std::to_string(s.feature) + '\t' + label + '\t' + std::to_string(s.count) + '\t' + format_real(s.frequency) +
           '\n';
  }
  return out;
}

std::string feature_stats_json(const std::vector<FeatureFrequency>& stats, const IdMap* labels) {
  OrderedJson j = OrderedJson::array();
  for (const auto& s : stats) {
    OrderedJson row;
    row["feature"] = s.feature;
    row["label"] = labels ? labels->label(s.feature) : std::to_string(s.feature);
    row["count"] = s.count;
    row["frequency"] = s.frequency;
    j.push_back(row);
  }
  return j.dump(2) + "\n";
}

const StageRecord* PipelineRun::stage(std::string_view name) const {
  for (const auto& s : stages) {
    if (s.name == name) return &s;
  }
  return nullptr;
}

std::string PipelineRun::to_json() const {
  OrderedJson j;
  j["config_hash"] = config_hash;
  j["output_dir"] = output_dir.string();
  j["stages"] = Json::array();
  for (const auto& s : stages) {
    OrderedJson row;
    row["name"] = s.name;
    row["key"] = s.key;
    row["executed"] = s.executed;
    row["seconds"] = s.seconds;
    row["artifacts"] = Json::array();
    for (const auto& a : s.artifacts) row["artifacts"].push_back(a.string());
    j["stages"].push_back(row);
  }
  return j.dump(2) + "\n";
}

void save_prepared_dataset(const fs::path& dir, const Dataset& ds) {
  write_coo(dir / "urm.coo", ds.urm);
  write_coo(dir / "icm.coo", ds.icm);
  write_lines(dir / "users.txt", ds.users.labels());
  write_lines(dir / "items.txt", ds.items.labels());
  write_lines(dir / "features.txt", ds.features.labels());
}

Dataset load_prepared_dataset(const fs::path& dir) {
  Dataset ds;
  ds.urm = read_coo(dir / "urm.coo");
  ds.icm = read_coo(dir / "icm.coo");
  ds.users = IdMap::from_labels(read_lines(dir / "users.txt"));
  ds.items = IdMap::from_labels(read_lines(dir / "items.txt"));
  ds.features = IdMap::from_labels(read_lines(dir / "features.txt"));
  ds.validate();
  return ds;
}

void save_splits(const fs::path& dir, const Splits& splits) {
  save_cold_split(dir, splits.cold);
  write_coo(dir / "holdout_train.coo", splits.holdout.train);
  write_coo(dir / "holdout_validation.coo", splits.holdout.validation);
}

Splits load_splits(const fs::path& dir) {
  Splits s;
  s.cold = load_cold_split(dir);
  s.holdout.train = read_coo(dir / "holdout_train.coo");
  s.holdout.validation = read_coo(dir / "holdout_validation.coo");
  return s;
}

void write_report(const fs::path& reports, const std::string& name, const std::string& json, const std::string& tsv) {
  write_file_atomic(reports / (name + ".json"), json);
  write_file_atomic(reports / (name + ".tsv"), tsv);
}

PipelineRun run_pipeline(const ExperimentConfig& cfg, PipelineStop stop) {
  cfg.validate();
  const fs::path out = cfg.output_dir;
  const std::string canonical = config_to_json(cfg);
  const Json sections = Json::parse(canonical);
  auto section = [&](const char* name) { return sections.at(name).dump(); };
  const std::string seed = std::to_string(cfg.seed);
  const std::string cutoff = std::to_string(cfg.cutoff);
  const std::string metric_name = std::string(to_string(cfg.cqfs.selection_metric));

  PipelineRun run;
  run.config_hash = hex_digest(fnv1a(canonical));
  run.output_dir = out;
  write_file_atomic(out / "config.json", canonical);
  StageGraph graph(out, run);
  const fs::path reports = layout::reports(out);
  const fs::path models = layout::models(out);

  auto finish = [&]() {
    write_file_atomic(out / "run.json", run.to_json());
    return run;
  };

  Dataset ds;
  const std::string data_key = stage_key("data", {section("dataset"), section("preprocess")});
  const fs::path data_dir = layout::data(out);
  graph.stage(
      "data", data_key,
      {data_dir / "urm.coo", data_dir / "icm.coo", data_dir / "users.txt", data_dir / "items.txt",
       data_dir / "features.txt"},
      [&] {
        ds = acquire_dataset(cfg);
        save_prepared_dataset(data_dir, ds);
      },
      [&] { ds = load_prepared_dataset(data_dir); });
  if (stop == PipelineStop::Data) return finish();

  Splits splits;
  const std::string split_key = stage_key("split", {data_key, section("split"), seed});
  const fs::path split_dir = layout::split(out);
  graph.stage(
      "split", split_key,
      {split_dir / "train.coo", split_dir / "validation.coo", split_dir / "test.coo", split_dir / "split.json",
       split_dir / "holdout_train.coo", split_dir / "holdout_validation.coo"},
      [&] {
        splits = make_splits(ds, cfg);
        save_splits(split_dir, splits);
      },
      [&] { splits = load_splits(split_dir); });
  if (stop == PipelineStop::Split) return finish();

  SimilarityModel cf;
  const std::string cf_key = stage_key("collaborative", {split_key, section("collaborative"), cutoff, seed});
  graph.stage(
      "collaborative", cf_key,
      {models / "cf.coo", models / "cf.json", reports / "cf_search.json", reports / "cf_search.tsv"},
      [&] {
        auto fit = search_collaborative(splits, cfg);
        cf = std::move(fit.model);
        save_model(models / "cf", cf);
        auto [json, tsv] = search_report(fit.search, cf.kind, "precision");
        write_report(reports, "cf_search", json, tsv);
      },
      [&] { cf = load_model(models / "cf"); });
  if (stop == PipelineStop::Collaborative) return finish();

  SimilarityModel teacher;
  const std::string teacher_key = stage_key("content_teacher", {split_key, section("content_teacher")});
  graph.stage(
      "content_teacher", teacher_key, {models / "cbf_teacher.coo", models / "cbf_teacher.json"},
      [&] {
        teacher = fit_content(warm_icm(ds.icm, splits.cold), cfg.content_teacher);
        save_model(models / "cbf_teacher", teacher);
      },
      [&] { teacher = load_model(models / "cbf_teacher"); });
  if (stop == PipelineStop::ContentTeacher) return finish();

  GridOutcome grid;
  const auto grid_configs = cfg.cqfs.points();
  const fs::path grid_dir = layout::grid(out);
  const std::string grid_key =
      stage_key("cqfs_grid", {cf_key, teacher_key, section("cqfs"), section("solver"), cutoff, seed});
  std::vector<fs::path> grid_artifacts{grid_dir / "grid.json", reports / "cqfs_grid.json",
                                       reports / "cqfs_grid.tsv"};
  for (std::size_t i = 0; i < grid_configs.size(); ++i) {
    grid_artifacts.push_back(grid_dir / (stem_name(i) + ".selection.json"));
    grid_artifacts.push_back(grid_dir / (stem_name(i) + ".qubo.coo"));
  }
  graph.stage(
      "cqfs_grid", grid_key, grid_artifacts,
      [&] {
        grid = run_cqfs_grid(cf, teacher, ds.icm, splits.cold, cfg);
        OrderedJson j;
        j["selection_metric"] = metric_name;
        j["best"] = grid.best;
        j["points"] = Json::array();
        std::string tsv = "point\talpha\tbeta\ts\tp\tk\tn_selected\tenergy\tsolver\tvalidation_" + metric_name + "\n";
        for (std::size_t i = 0; i < grid.points.size(); ++i) {
          const auto& pt = grid.points[i];
          save_qubo(grid_dir / (stem_name(i) + ".qubo"), pt.problem);
          save_selection(grid_dir / (stem_name(i) + ".selection.json"), pt.selection);
          const double k = pt.cqfs.p * static_cast<double>(ds.n_features());
          OrderedJson row;
          row["alpha"] = pt.cqfs.alpha;
          row["beta"] = pt.cqfs.beta;
          row["s"] = pt.cqfs.s;
          row["p"] = pt.cqfs.p;
          row["k"] = k;
          row["n_selected"] = pt.selection.count_selected();
          row["energy"] = pt.selection.energy;
          row["solver"] = std::string(to_string(pt.selection.solver));
          row["validation_score"] = pt.validation_score;
          j["points"].push_back(row);
          tsv += std::to_string(i) + '\t' + format_real(pt.cqfs.alpha) + '\t' + format_real(pt.cqfs.beta) + '\t' +
                 format_real(pt.cqfs.s) + '\t' + format_real(pt.cqfs.p) + '\t' + format_real(k) + '\t' +
                 std::to_string(pt.selection.count_selected()) + '\t' + format_real(pt.selection.energy) + '\t' +
                 std::string(to_string(pt.selection.solver)) + '\t' + format_real(pt.validation_score) + '\n';
        }
        const std::string json = j.dump(2) + "\n";
        write_file_atomic(grid_dir / "grid.json", json);
        write_report(reports, "cqfs_grid", json, tsv);
      },
      [&] {
        const Json j = parse_json(grid_dir / "grid.json");
        grid.best = j.at("best").get<std::size_t>();
        for (std::size_t i = 0; i < grid_configs.size(); ++i) {
          GridPoint pt;
          pt.cqfs = grid_configs[i];
          pt.selection = load_selection(grid_dir / (stem_name(i) + ".selection.json"));
          pt.validation_score = j.at("points").at(i).at("validation_score").get<double>();
          grid.points.push_back(std::move(pt));
        }
      });
  if (stop == PipelineStop::Grid) return finish();

  const std::string final_key = stage_key("final_cbf", {grid_key, section("final_cbf"), cutoff, seed});
  graph.stage(
      "final_cbf", final_key,
      {models / "cbf_final.coo", models / "cbf_final.json", reports / "final_cbf_search.json",
       reports / "final_cbf_search.tsv", reports / "cqfs.json", reports / "cqfs.tsv"},
      [&] {
        const GridPoint& winner = grid.winner();
        const Evaluated result = evaluate_selection("cqfs", winner.selection.selected(), ds, splits.cold, cfg);
        save_model(models / "cbf_final", result.fit.model);
        auto [search_json, search_tsv] = search_report(result.fit.search, SimilarityKind::ItemKnnCbf, metric_name);
        write_report(reports, "final_cbf_search", search_json, search_tsv);

        OrderedJson j = evaluated_json(result, ds.features, metric_name);
        OrderedJson w;
        w["point"] = grid.best;
        w["alpha"] = winner.cqfs.alpha;
        w["beta"] = winner.cqfs.beta;
        w["s"] = winner.cqfs.s;
        w["p"] = winner.cqfs.p;
        w["validation_score"] = winner.validation_score;
        j["winner"] = w;
        write_report(reports, "cqfs", j.dump(2) + "\n", EvalReport::tsv_header() + result.report.to_tsv_row("cqfs"));
      },
      [] {});
  if (stop == PipelineStop::Final) return finish();

  if (cfg.baselines.all_features || cfg.baselines.random || !cfg.baselines.tfidf_quotas.empty()) {
    const std::string baseline_key = stage_key(
        "baselines", {grid_key, section("final_cbf"), section("baselines"), cutoff, seed});
    graph.stage(
        "baselines", baseline_key, {reports / "baselines.json", reports / "baselines.tsv"},
        [&] {
          std::vector<std::pair<std::string, std::vector<std::size_t>>> selections;
          const std::size_t n = ds.n_features();
          if (cfg.baselines.all_features) {
            std::vector<std::size_t> all(n);
            std::iota(all.begin(), all.end(), std::size_t{0});
            selections.emplace_back("all_features", std::move(all));
          }
          for (double q : cfg.baselines.tfidf_quotas) {
            selections.emplace_back("tfidf_" + std::to_string(std::llround(q * 100.0)),
                                    baseline_tfidf_selection(ds.icm, q));
          }
          if (cfg.baselines.random) {
            const std::size_t count = grid.winner().selection.count_selected();
            selections.emplace_back("random_" + std::to_string(count),
                                    random_subset(n, count, derive_seed(cfg.seed, "random_baseline")));
          }
          OrderedJson j;
          j["baselines"] = Json::array();
          std::string tsv = EvalReport::tsv_header();
          for (const auto& [label, features] : selections) {
            const Evaluated result = evaluate_selection(label, features, ds, splits.cold, cfg);
            j["baselines"].push_back(evaluated_json(result, ds.features, metric_name));
            tsv += result.report.to_tsv_row(label);
          }
          write_report(reports, "baselines", j.dump(2) + "\n", tsv);
        },
        [] {});
  }

  const std::string stats_key = stage_key("feature_stats", {grid_key});
  graph.stage(
      "feature_stats", stats_key, {reports / "feature_selection_stats.json", reports / "feature_selection_stats.tsv"},
      [&] {
        std::vector<std::vector<std::size_t>> selections;
        for (const auto& pt : grid.points) selections.push_back(pt.selection.selected());
        const auto stats = feature_selection_stats(selections, ds.n_features());
        write_report(reports, "feature_selection_stats", feature_stats_json(stats, &ds.features),
                     feature_stats_tsv(stats, &ds.features));
      },
      [] {});
  return finish();
}

}  // namespace cqfs
