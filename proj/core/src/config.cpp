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

#include "cqfs/config.hpp"

#include <cmath>
#include <cstdio>
#include <initializer_list>
#include <set>

#include <json.hpp>

#include "cqfs/error.hpp"
#include "cqfs/io.hpp"

namespace cqfs {
namespace {

using Json = nlohmann::json;
using OrderedJson = nlohmann::ordered_json;

[[noreturn]] void invalid(const std::string& message) { throw Error(ErrorCode::ConfigInvalid, message); }

void require_keys(const Json& obj, const std::string& where, std::initializer_list<std::string_view> allowed) {
  if (!obj.is_object()) invalid(where + ": expected an object");
  for (const auto& item : obj.items()) {
    bool known = false;
    for (auto key : allowed) known = known || item.key() == key;
    if (!known) invalid(where + ": unknown key '" + item.key() + "'");
  }
}

template <class T>
void read(const Json& obj, const char* key, const std::string& where, T& out) {
  if (!obj.contains(key)) return;
  try {
    out = obj.at(key).get<T>();
  } catch (const nlohmann::json::exception&) {
    invalid(where + "." + key + ": wrong type");
  }
}

std::size_t read_count(const Json& obj, const char* key, const std::string& where, std::size_t fallback) {
  if (!obj.contains(key)) return fallback;
  const auto& v = obj.at(key);
  if (!v.is_number_unsigned() && !(v.is_number_integer() && v.get<long long>() >= 0)) {
    invalid(where + "." + key + ": expected a non-negative integer");
  }
  return v.get<std::size_t>();
}

std::vector<double> read_reals(const Json& obj, const char* key, const std::string& where,
                               std::vector<double> fallback) {
  if (!obj.contains(key)) return fallback;
  const auto& v = obj.at(key);
  std::vector<double> out;
  if (v.is_number()) {
    out.push_back(v.get<double>());
  } else if (v.is_array()) {
    for (const auto& e : v) {
      if (!e.is_number()) invalid(where + "." + key + ": expected numbers");
      out.push_back(e.get<double>());
    }
  } else {
    invalid(where + "." + key + ": expected a number or a list of numbers");
  }
  return out;
}

ParamValue to_param_value(const Json& v, const std::string& where) {
  if (v.is_boolean()) return v.get<bool>();
  if (v.is_number_integer()) return v.get<std::int64_t>();
  if (v.is_number()) return v.get<double>();
  if (v.is_string()) return v.get<std::string>();
  invalid(where + ": unsupported choice value");
}

OrderedJson from_param_value(const ParamValue& v) {
  return std::visit([](const auto& x) { return OrderedJson(x); }, v);
}

std::string_view to_string(Distribution d) {
  switch (d) {
    case Distribution::UniformInt: return "uniform_int";
    case Distribution::Uniform: return "uniform";
    case Distribution::LogUniform: return "log_uniform";
    case Distribution::Categorical: return "categorical";
  }
  return "unknown";
}

Distribution parse_distribution(std::string_view text, const std::string& where) {
  for (auto d : {Distribution::UniformInt, Distribution::Uniform, Distribution::LogUniform, Distribution::Categorical}) {
    if (text == to_string(d)) return d;
  }
  invalid(where + ": unknown distribution '" + std::string(text) + "'");
}

void parse_space(const Json& obj, const std::string& where, SearchSpace& space) {
  if (!obj.is_object()) invalid(where + ": expected an object");
  for (const auto& item : obj.items()) {
    const std::string name = item.key();
    const std::string here = where + "." + name;
    const ParamSpec* base = space.find(name);
    if (base == nullptr) invalid(here + ": not a hyperparameter of this model");
    const Json& spec = item.value();
    require_keys(spec, here, {"distribution", "low", "high", "choices"});

    ParamSpec out = *base;
    if (spec.contains("distribution")) {
      out.distribution = parse_distribution(spec["distribution"].is_string() ? spec["distribution"].get<std::string>() : "",
                                            here);
    } else if (spec.contains("choices")) {
      out.distribution = Distribution::Categorical;
    }
    read(spec, "low", here, out.low);
    read(spec, "high", here, out.high);
    if (spec.contains("choices")) {
      if (!spec["choices"].is_array()) invalid(here + ".choices: expected a list");
      out.choices.clear();
      for (const auto& c : spec["choices"]) out.choices.push_back(to_param_value(c, here));
    }
    try {
      space.set(out);
    } catch (const Error& e) {
      invalid(here + ": " + e.what());
    }
  }
}

void parse_model_search(const Json& obj, const std::string& where, ModelSearchConfig& cfg, bool content) {
  require_keys(obj, where, {"kind", "n_cases", "space"});
  if (obj.contains("kind")) {
    if (!obj["kind"].is_string()) invalid(where + ".kind: expected a string");
    try {
      cfg.kind = parse_similarity_kind(obj["kind"].get<std::string>());
    } catch (const Error& e) {
      invalid(where + ".kind: " + e.what());
    }
    if (content != (cfg.kind == SimilarityKind::ItemKnnCbf)) {
      if (content) invalid(where + ".kind: the content model must be itemknn_cbf");
      invalid(where + ".kind: itemknn_cbf is not a collaborative model");
    }
    cfg.space = default_space(cfg.kind);
  }
  cfg.n_cases = read_count(obj, "n_cases", where, cfg.n_cases);
  if (obj.contains("space")) parse_space(obj["space"], where + ".space", cfg.space);
}

void parse_knn(const Json& obj, const std::string& where, KnnParams& p) {
  require_keys(obj, where, {"topK", "shrink", "normalize", "weighting"});
  p.top_k = read_count(obj, "topK", where, p.top_k);
  read(obj, "shrink", where, p.shrink);
  read(obj, "normalize", where, p.normalize);
  if (obj.contains("weighting")) {
    std::string text;
    read(obj, "weighting", where, text);
    p.weighting = parse_feature_weighting(text);
  }
}

OrderedJson knn_to_json(const KnnParams& p) {
  OrderedJson j;
  j["topK"] = p.top_k;
  j["shrink"] = p.shrink;
  j["normalize"] = p.normalize;
  j["weighting"] = std::string(to_string(p.weighting));
  return j;
}

OrderedJson space_to_json(const SearchSpace& space) {
  OrderedJson j = OrderedJson::object();
  for (const auto& spec : space.params) {
    OrderedJson s;
    s["distribution"] = std::string(to_string(spec.distribution));
    if (spec.distribution == Distribution::Categorical) {
      s["choices"] = Json::array();
      for (const auto& c : spec.choices) s["choices"].push_back(from_param_value(c));
    } else {
      s["low"] = spec.low;
      s["high"] = spec.high;
    }
    j[spec.name] = s;
  }
  return j;
}

OrderedJson search_to_json(const ModelSearchConfig& cfg) {
  OrderedJson j;
  j["kind"] = std::string(to_string(cfg.kind));
  j["n_cases"] = cfg.n_cases;
  j["space"] = space_to_json(cfg.space);
  return j;
}

void check_knn(const KnnParams& p, const std::string& where) {
  if (p.top_k == 0) invalid(where + ".topK must be >= 1");
  if (!(p.shrink >= 0.0)) invalid(where + ".shrink must be >= 0");
}

void check_quota(double q, const std::string& where) {
  if (!(q > 0.0 && q <= 1.0)) invalid(where + " must be in (0, 1]");
}

}  // namespace

std::vector<CqfsConfig> CqfsGrid::points() const {
  std::vector<CqfsConfig> out;
  for (double a : alpha) {
    for (double b : beta) {
      for (double strength : s) {
        for (double quota : p) out.push_back({a, b, quota, strength});
      }
    }
  }
  return out;
}

ExperimentConfig::ExperimentConfig() {
  collaborative.space = default_space(collaborative.kind);
  dataset.synth = SynthConfig{};
}

void ExperimentConfig::validate() const {
  if (!dataset.synth && (!dataset.interactions || !dataset.item_features)) {
    invalid("dataset: give either synth parameters or both interactions and item_features paths");
  }
  if (dataset.synth) {
    const auto& s = *dataset.synth;
    if (s.n_users == 0 || s.n_items == 0 || s.n_features == 0 || s.n_relevant == 0) {
      invalid("dataset.synth: sizes must be >= 1");
    }
    if (!(s.noise_rate >= 0.0 && s.noise_rate <= 1.0)) invalid("dataset.synth.noise_rate must be in [0, 1]");
    if (!(s.extra_features_mean >= 0.0)) invalid("dataset.synth.extra_features_mean must be >= 0");
  }
  if (!(split.test_quota > 0.0 && split.validation_quota > 0.0 && split.test_quota + split.validation_quota < 1.0)) {
    invalid("split: quotas must be positive and sum to less than 1");
  }
  if (!(split.holdout_quota > 0.0 && split.holdout_quota < 1.0)) invalid("split.holdout_quota must be in (0, 1)");
  if (collaborative.n_cases == 0) invalid("collaborative.n_cases must be >= 1");
  if (collaborative.space.params.empty()) invalid("collaborative.space is empty");
  if (final_cbf.space.params.empty()) invalid("final_cbf.space is empty");
  check_knn(content_teacher, "content_teacher");
  check_knn(cqfs.cbf, "cqfs.cbf");
  if (cqfs.alpha.empty() || cqfs.beta.empty() || cqfs.s.empty() || cqfs.p.empty()) {
    invalid("cqfs: every grid list needs at least one value");
  }
  for (const auto& point : cqfs.points()) {
    try {
      point.validate();
    } catch (const Error& e) {
      invalid(std::string("cqfs: ") + e.what());
    }
  }
  if (solver.num_samples == 0) invalid("solver.num_samples must be >= 1");
  if (solver.sweeps && *solver.sweeps == 0) invalid("solver.sweeps must be >= 1");
  if (solver.beta_start && !(*solver.beta_start > 0.0)) invalid("solver.beta_start must be > 0");
  if (solver.beta_end && !(*solver.beta_end > 0.0)) invalid("solver.beta_end must be > 0");
  for (double q : baselines.tfidf_quotas) check_quota(q, "baselines.tfidf_quotas");
  if (cutoff == 0) invalid("cutoff must be >= 1");
}

SearchSpace default_space(SimilarityKind kind) {
  switch (kind) {
    case SimilarityKind::PureSvd: return puresvd_space();
    case SimilarityKind::Rp3Beta: return rp3beta_space();
    default: return itemknn_space();
  }
}

std::string_view to_string(RankingMetric metric) {
  switch (metric) {
    case RankingMetric::Precision: return "precision";
    case RankingMetric::Recall: return "recall";
    case RankingMetric::Ndcg: return "ndcg";
    case RankingMetric::Map: return "map";
  }
  return "unknown";
}

RankingMetric parse_ranking_metric(std::string_view text) {
  for (auto m : {RankingMetric::Precision, RankingMetric::Recall, RankingMetric::Ndcg, RankingMetric::Map}) {
    if (text == to_string(m)) return m;
  }
  invalid("unknown metric '" + std::string(text) + "'");
}

std::string_view to_string(SolverChoice choice) {
  switch (choice) {
    case SolverChoice::Auto: return "auto";
    case SolverChoice::Exhaustive: return "exhaustive";
    case SolverChoice::SimulatedAnnealing: return "sa";
  }
  return "unknown";
}

SolverChoice parse_solver_choice(std::string_view text) {
  if (text == "auto") return SolverChoice::Auto;
  return parse_solver_kind(text) == SolverKind::Exhaustive ? SolverChoice::Exhaustive
                                                           : SolverChoice::SimulatedAnnealing;
}

ExperimentConfig parse_config(const std::string& json_text, const std::filesystem::path& base_dir) {
  Json root;
  try {
    root = Json::parse(json_text);
  } catch (const nlohmann::json::exception& e) {
    invalid(std::string("config is not valid JSON: ") + e.what());
  }
  require_keys(root, "config", {"dataset", "preprocess", "split", "collaborative", "content_teacher", "cqfs",
                                "solver", "final_cbf", "baselines", "cutoff", "seed", "workers", "output_dir"});

  ExperimentConfig cfg;
  try {
    if (root.contains("dataset")) {
      const auto& d = root["dataset"];
      require_keys(d, "dataset", {"synth", "interactions", "item_features", "value_mode"});
      if (d.contains("interactions") || d.contains("item_features")) {
        cfg.dataset.synth.reset();
        std::string path;
        read(d, "interactions", "dataset", path);
        if (!path.empty()) cfg.dataset.interactions = base_dir / path;
        path.clear();
        read(d, "item_features", "dataset", path);
        if (!path.empty()) cfg.dataset.item_features = base_dir / path;
      }
      if (d.contains("value_mode")) {
        std::string mode;
        read(d, "value_mode", "dataset", mode);
        if (mode == "explicit") cfg.dataset.value_mode = ValueMode::Explicit;
        else if (mode == "implicit") cfg.dataset.value_mode = ValueMode::ImplicitBinary;
        else invalid("dataset.value_mode must be 'explicit' or 'implicit'");
      }
      if (d.contains("synth")) {
        if (cfg.dataset.interactions) invalid("dataset: synth and file paths are mutually exclusive");
        const auto& s = d["synth"];
        require_keys(s, "dataset.synth", {"n_users", "n_items", "n_features", "n_relevant", "interactions_per_user",
                                          "noise_rate", "extra_features_mean", "seed"});
        SynthConfig sc;
        sc.n_users = read_count(s, "n_users", "dataset.synth", sc.n_users);
        sc.n_items = read_count(s, "n_items", "dataset.synth", sc.n_items);
        sc.n_features = read_count(s, "n_features", "dataset.synth", sc.n_features);
        sc.n_relevant = read_count(s, "n_relevant", "dataset.synth", sc.n_relevant);
        sc.interactions_per_user = read_count(s, "interactions_per_user", "dataset.synth", sc.interactions_per_user);
        read(s, "noise_rate", "dataset.synth", sc.noise_rate);
        read(s, "extra_features_mean", "dataset.synth", sc.extra_features_mean);
        read(s, "seed", "dataset.synth", sc.seed);
        cfg.dataset.synth = sc;
      }
    }
    if (root.contains("preprocess")) {
      const auto& p = root["preprocess"];
      require_keys(p, "preprocess", {"min_user_interactions", "min_item_interactions", "min_feature_items"});
      auto& t = cfg.preprocess;
      t.min_user_interactions = read_count(p, "min_user_interactions", "preprocess", t.min_user_interactions);
      t.min_item_interactions = read_count(p, "min_item_interactions", "preprocess", t.min_item_interactions);
      t.min_feature_items = read_count(p, "min_feature_items", "preprocess", t.min_feature_items);
    }
    if (root.contains("split")) {
      const auto& s = root["split"];
      require_keys(s, "split", {"test_quota", "validation_quota", "holdout_quota"});
      read(s, "test_quota", "split", cfg.split.test_quota);
      read(s, "validation_quota", "split", cfg.split.validation_quota);
      read(s, "holdout_quota", "split", cfg.split.holdout_quota);
    }
    if (root.contains("collaborative")) parse_model_search(root["collaborative"], "collaborative", cfg.collaborative, false);
    if (root.contains("content_teacher")) parse_knn(root["content_teacher"], "content_teacher", cfg.content_teacher);
    if (root.contains("cqfs")) {
      const auto& c = root["cqfs"];
      require_keys(c, "cqfs", {"alpha", "beta", "s", "p", "selection_metric", "cbf"});
      cfg.cqfs.alpha = read_reals(c, "alpha", "cqfs", cfg.cqfs.alpha);
      cfg.cqfs.beta = read_reals(c, "beta", "cqfs", cfg.cqfs.beta);
      cfg.cqfs.s = read_reals(c, "s", "cqfs", cfg.cqfs.s);
      cfg.cqfs.p = read_reals(c, "p", "cqfs", cfg.cqfs.p);
      if (c.contains("selection_metric")) {
        std::string m;
        read(c, "selection_metric", "cqfs", m);
        cfg.cqfs.selection_metric = parse_ranking_metric(m);
      }
      if (c.contains("cbf")) parse_knn(c["cbf"], "cqfs.cbf", cfg.cqfs.cbf);
    }
    if (root.contains("solver")) {
      const auto& s = root["solver"];
      require_keys(s, "solver", {"kind", "num_samples", "sweeps", "beta_start", "beta_end"});
      if (s.contains("kind")) {
        std::string k;
        read(s, "kind", "solver", k);
        cfg.solver.choice = parse_solver_choice(k);
      }
      cfg.solver.num_samples = read_count(s, "num_samples", "solver", cfg.solver.num_samples);
      if (s.contains("sweeps")) cfg.solver.sweeps = read_count(s, "sweeps", "solver", 0);
      if (s.contains("beta_start")) {
        double v = 0.0;
        read(s, "beta_start", "solver", v);
        cfg.solver.beta_start = v;
      }
      if (s.contains("beta_end")) {
        double v = 0.0;
        read(s, "beta_end", "solver", v);
        cfg.solver.beta_end = v;
      }
    }
    if (root.contains("final_cbf")) parse_model_search(root["final_cbf"], "final_cbf", cfg.final_cbf, true);
    if (root.contains("baselines")) {
      const auto& b = root["baselines"];
      require_keys(b, "baselines", {"all_features", "tfidf_quotas", "random"});
      read(b, "all_features", "baselines", cfg.baselines.all_features);
      cfg.baselines.tfidf_quotas = read_reals(b, "tfidf_quotas", "baselines", cfg.baselines.tfidf_quotas);
      read(b, "random", "baselines", cfg.baselines.random);
    }
    cfg.cutoff = read_count(root, "cutoff", "config", cfg.cutoff);
    read(root, "seed", "config", cfg.seed);
    cfg.workers = read_count(root, "workers", "config", cfg.workers);
    if (root.contains("output_dir")) {
      std::string dir;
      read(root, "output_dir", "config", dir);
      cfg.output_dir = dir;
    }
  } catch (const Error& e) {
    if (e.code() == ErrorCode::ConfigInvalid) throw;
    invalid(e.what());
  }
  cfg.validate();
  return cfg;
}

ExperimentConfig load_config(const std::filesystem::path& path) {
  std::string text;
  try {
    text = read_text_file(path);
  } catch (const Error& e) {
    invalid(e.what());
  }
  return parse_config(text, path.parent_path());
}

std::string config_to_json(const ExperimentConfig& cfg) {
  OrderedJson j;
  OrderedJson d;
  if (cfg.dataset.synth) {
    const auto& s = *cfg.dataset.synth;
    OrderedJson sj;
    sj["n_users"] = s.n_users;
    sj["n_items"] = s.n_items;
    sj["n_features"] = s.n_features;
    sj["n_relevant"] = s.n_relevant;
    sj["interactions_per_user"] = s.interactions_per_user;
    sj["noise_rate"] = s.noise_rate;
    sj["extra_features_mean"] = s.extra_features_mean;
    sj["seed"] = s.seed;
    d["synth"] = sj;
  } else {
    d["interactions"] = cfg.dataset.interactions->string();
    d["item_features"] = cfg.dataset.item_features->string();
    d["value_mode"] = cfg.dataset.value_mode == ValueMode::Explicit ? "explicit" : "implicit";
  }
  j["dataset"] = d;
  j["preprocess"] = {{"min_user_interactions", cfg.preprocess.min_user_interactions},
                     {"min_item_interactions", cfg.preprocess.min_item_interactions},
                     {"min_feature_items", cfg.preprocess.min_feature_items}};
  OrderedJson split;
  split["test_quota"] = cfg.split.test_quota;
  split["validation_quota"] = cfg.split.validation_quota;
  split["holdout_quota"] = cfg.split.holdout_quota;
  j["split"] = split;
  j["collaborative"] = search_to_json(cfg.collaborative);
  j["content_teacher"] = knn_to_json(cfg.content_teacher);
  OrderedJson c;
  c["alpha"] = cfg.cqfs.alpha;
  c["beta"] = cfg.cqfs.beta;
  c["s"] = cfg.cqfs.s;
  c["p"] = cfg.cqfs.p;
  c["selection_metric"] = std::string(to_string(cfg.cqfs.selection_metric));
  c["cbf"] = knn_to_json(cfg.cqfs.cbf);
  j["cqfs"] = c;
  OrderedJson s;
  s["kind"] = std::string(to_string(cfg.solver.choice));
  s["num_samples"] = cfg.solver.num_samples;
  if (cfg.solver.sweeps) s["sweeps"] = *cfg.solver.sweeps;
  if (cfg.solver.beta_start) s["beta_start"] = *cfg.solver.beta_start;
  if (cfg.solver.beta_end) s["beta_end"] = *cfg.solver.beta_end;
  j["solver"] = s;
  j["final_cbf"] = search_to_json(cfg.final_cbf);
  OrderedJson b;
  b["all_features"] = cfg.baselines.all_features;
  b["tfidf_quotas"] = cfg.baselines.tfidf_quotas;
  b["random"] = cfg.baselines.random;
  j["baselines"] = b;
  j["cutoff"] = cfg.cutoff;
  j["seed"] = cfg.seed;
  return j.dump(2) + "\n";
}

std::uint64_t fnv1a(std::string_view bytes, std::uint64_t basis) {
  std::uint64_t h = basis;
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

std::string hex_digest(std::uint64_t hash) {
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(hash));
  return buf;
}

std::uint64_t derive_seed(std::uint64_t seed, std::string_view tag) {
  std::uint64_t state = seed ^ fnv1a(tag);
  return splitmix64(state);
}

}  // namespace cqfs
