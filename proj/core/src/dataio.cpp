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

#include "cqfs/dataio.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <istream>
#include <numeric>
#include <sstream>

#include <json.hpp>

#include "cqfs/error.hpp"
#include "cqfs/io.hpp"
#include "cqfs/random.hpp"

namespace cqfs {
namespace {

std::vector<std::string> split_tabs(const std::string& line) {
  std::vector<std::string> fields;
  std::size_t start = 0;
  for (;;) {
    std::size_t tab = line.find('\t', start);
    if (tab == std::string::npos) {
      fields.push_back(line.substr(start));
      return fields;
    }
    fields.push_back(line.substr(start, tab - start));
    start = tab + 1;
  }
}

// Returns false for lines that carry no record.
bool next_record(std::istream& in, std::string& line, std::size_t& line_no) {
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty() || line.front() == '#') continue;
    return true;
  }
  return false;
}

Error parse_error(std::size_t line_no, const std::string& why) {
  return Error(ErrorCode::ParseError, "line " + std::to_string(line_no) + ": " + why);
}

// Keeps only entries whose row and column survive, re-indexing both.
SparseMatrix reindex(const SparseMatrix& m, const std::vector<bool>& keep_rows, const std::vector<bool>& keep_cols) {
  std::vector<std::size_t> row_map(m.n_rows()), col_map(m.n_cols());
  std::size_t n_rows = 0, n_cols = 0;
  for (std::size_t r = 0; r < m.n_rows(); ++r) row_map[r] = keep_rows[r] ? n_rows++ : 0;
  for (std::size_t c = 0; c < m.n_cols(); ++c) col_map[c] = keep_cols[c] ? n_cols++ : 0;
  std::vector<Triplet> triplets;
  for (const auto& t : m.triplets()) {
    if (keep_rows[t.row] && keep_cols[t.col]) triplets.push_back({row_map[t.row], col_map[t.col], t.value});
  }
  return SparseMatrix::from_triplets(n_rows, n_cols, triplets);
}

IdMap filter_ids(const IdMap& ids, const std::vector<bool>& keep) {
  std::vector<std::string> labels;
  for (std::size_t i = 0; i < ids.size(); ++i) {
    if (keep[i]) labels.push_back(ids.label(i));
  }
  return IdMap::from_labels(std::move(labels));
}

void check_fraction(double q, const char* name) {
  if (!(q >= 0.0 && q < 1.0)) {
    throw Error(ErrorCode::InvalidArgument, std::string(name) + " must lie in [0, 1)");
  }
}

}  // namespace

std::size_t IdMap::intern(const std::string& label) {
  auto [it, inserted] = index_.try_emplace(label, labels_.size());
  if (inserted) labels_.push_back(label);
  return it->second;
}

std::optional<std::size_t> IdMap::find(const std::string& label) const {
  auto it = index_.find(label);
  if (it == index_.end()) return std::nullopt;
  return it->second;
}

IdMap IdMap::from_labels(std::vector<std::string> labels) {
  IdMap ids;
  for (auto& label : labels) {
    if (ids.find(label)) throw Error(ErrorCode::InvalidArgument, "duplicate label '" + label + "'");
    ids.intern(label);
  }
  return ids;
}

void Dataset::validate() const {
  if (urm.n_cols() != icm.n_rows()) {
    throw Error(ErrorCode::InvalidArgument, "URM and ICM disagree on the number of items");
  }
  if (users.size() != urm.n_rows() || items.size() != urm.n_cols() || features.size() != icm.n_cols()) {
    throw Error(ErrorCode::InvalidArgument, "id maps do not match matrix shapes");
  }
  for (double v : icm.values()) {
    if (v != 1.0) throw Error(ErrorCode::InvalidArgument, "ICM must be binary");
  }
  for (double v : urm.values()) {
    if (!(v > 0.0)) throw Error(ErrorCode::InvalidArgument, "URM values must be positive");
  }
}

std::vector<RawInteraction> load_interactions(std::istream& in, ValueMode mode) {
  std::vector<RawInteraction> out;
  std::string line;
  std::size_t line_no = 0;
  while (next_record(in, line, line_no)) {
    auto fields = split_tabs(line);
    if (fields.size() < 2 || fields.size() > 3) throw parse_error(line_no, "expected user<TAB>item[<TAB>value]");
    if (fields[0].empty() || fields[1].empty()) throw parse_error(line_no, "empty user or item label");
    RawInteraction rec{fields[0], fields[1], 1.0};
    if (fields.size() == 3) {
      std::istringstream value_in(fields[2]);
      double v;
      if (!(value_in >> v) || !(value_in >> std::ws).eof() || !std::isfinite(v)) {
        throw parse_error(line_no, "bad value '" + fields[2] + "'");
      }
      if (v < 0.0) {
        throw Error(ErrorCode::NegativeValue, "line " + std::to_string(line_no) + ": negative interaction value");
      }
      rec.value = v;
    }
    if (mode == ValueMode::ImplicitBinary) rec.value = 1.0;
    out.push_back(std::move(rec));
  }
  return out;
}

std::vector<RawInteraction> load_interactions(const std::filesystem::path& path, ValueMode mode) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::Io, "cannot open " + path.string());
  return load_interactions(in, mode);
}

std::vector<RawItemFeature> load_item_features(std::istream& in) {
  std::vector<RawItemFeature> out;
  std::string line;
  std::size_t line_no = 0;
  while (next_record(in, line, line_no)) {
    auto fields = split_tabs(line);
    if (fields.size() != 2 || fields[0].empty() || fields[1].empty()) {
      throw parse_error(line_no, "expected item<TAB>feature");
    }
    out.push_back({fields[0], fields[1]});
  }
  return out;
}

std::vector<RawItemFeature> load_item_features(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::Io, "cannot open " + path.string());
  return load_item_features(in);
}

Dataset make_dataset(const std::vector<RawInteraction>& interactions, const std::vector<RawItemFeature>& features,
                     ValueMode mode) {
  Dataset ds;
  std::vector<Triplet> urm_entries;
  urm_entries.reserve(interactions.size());
  for (const auto& rec : interactions) {
    if (rec.value < 0.0) throw Error(ErrorCode::NegativeValue, "negative interaction value");
    urm_entries.push_back({ds.users.intern(rec.user), ds.items.intern(rec.item), rec.value});
  }
  std::vector<Triplet> icm_entries;
  icm_entries.reserve(features.size());
  for (const auto& rec : features) {
    icm_entries.push_back({ds.items.intern(rec.item), ds.features.intern(rec.feature), 1.0});
  }
  ds.urm = SparseMatrix::from_triplets(ds.users.size(), ds.items.size(), urm_entries);
  if (mode == ValueMode::ImplicitBinary) ds.urm = binarize(ds.urm);
  ds.icm = binarize(SparseMatrix::from_triplets(ds.items.size(), ds.features.size(), icm_entries));
  ds.validate();
  return ds;
}

Dataset load_dataset(const std::filesystem::path& interactions, const std::filesystem::path& item_features,
                     ValueMode mode) {
  return make_dataset(load_interactions(interactions, mode), load_item_features(item_features), mode);
}

void save_dataset(const std::filesystem::path& dir, const Dataset& ds) {
  std::ostringstream urm_out;
  for (const auto& t : ds.urm.triplets()) {
    urm_out << ds.users.label(t.row) << '\t' << ds.items.label(t.col) << '\t' << format_real(t.value) << '\n';
  }
  std::ostringstream icm_out;
  for (const auto& t : ds.icm.triplets()) {
    icm_out << ds.items.label(t.row) << '\t' << ds.features.label(t.col) << '\n';
  }
  write_file_atomic(dir / "interactions.tsv", urm_out.str());
  write_file_atomic(dir / "icm.tsv", icm_out.str());
}

Dataset preprocess(const Dataset& ds, const PreprocessThresholds& thresholds) {
  std::vector<bool> keep_user(ds.n_users(), true);
  std::vector<bool> keep_item(ds.n_items(), true);
  std::vector<bool> keep_feature(ds.n_features(), true);

  for (bool changed = true; changed;) {
    changed = false;
    std::vector<std::size_t> user_count(ds.n_users(), 0), item_count(ds.n_items(), 0),
        feature_count(ds.n_features(), 0);
    for (std::size_t u = 0; u < ds.n_users(); ++u) {
      if (!keep_user[u]) continue;
      for (Index i : ds.urm.row(u).cols) {
        if (!keep_item[i]) continue;
        ++user_count[u];
        ++item_count[i];
      }
    }
    for (std::size_t i = 0; i < ds.n_items(); ++i) {
      if (!keep_item[i]) continue;
      for (Index f : ds.icm.row(i).cols) {
        if (keep_feature[f]) ++feature_count[f];
      }
    }
    auto prune = [&](std::vector<bool>& keep, const std::vector<std::size_t>& counts, std::size_t min) {
      for (std::size_t k = 0; k < keep.size(); ++k) {
        if (keep[k] && counts[k] < min) {
          keep[k] = false;
          changed = true;
        }
      }
    };
    prune(keep_user, user_count, thresholds.min_user_interactions);
    prune(keep_item, item_count, thresholds.min_item_interactions);
    prune(keep_feature, feature_count, thresholds.min_feature_items);
  }

  const auto survivors = [](const std::vector<bool>& keep) { return std::count(keep.begin(), keep.end(), true); };
  if (survivors(keep_user) == 0 || survivors(keep_item) == 0) {
    throw Error(ErrorCode::EmptyDataset, "preprocessing removed every user or item");
  }

  Dataset out;
  out.urm = reindex(ds.urm, keep_user, keep_item);
  out.icm = reindex(ds.icm, keep_item, keep_feature);
  out.users = filter_ids(ds.users, keep_user);
  out.items = filter_ids(ds.items, keep_item);
  out.features = filter_ids(ds.features, keep_feature);
  return out;
}

std::vector<std::size_t> ColdSplit::warm_items() const {
  std::vector<bool> cold(train.n_cols(), false);
  for (const auto* pool : {&cold_test_items, &cold_validation_items}) {
    for (auto i : *pool) {
      if (i >= cold.size()) throw Error(ErrorCode::IndexOutOfRange, "cold item " + std::to_string(i));
      cold[i] = true;
    }
  }
  std::vector<std::size_t> warm;
  for (std::size_t i = 0; i < cold.size(); ++i) {
    if (!cold[i]) warm.push_back(i);
  }
  return warm;
}

ColdSplit cold_item_split(const SparseMatrix& urm, double test_quota, double validation_quota, std::uint64_t seed) {
  check_fraction(test_quota, "test_quota");
  check_fraction(validation_quota, "validation_quota");
  if (test_quota + validation_quota >= 1.0) {
    throw Error(ErrorCode::InvalidArgument, "test_quota + validation_quota must be < 1");
  }
  const auto counts = column_counts(urm);
  const double total = static_cast<double>(urm.nnz());
  const double largest_allowed = (1.0 - test_quota - validation_quota) * total;
  for (std::size_t i = 0; i < counts.size(); ++i) {
    if (static_cast<double>(counts[i]) > largest_allowed) {
      throw Error(ErrorCode::QuotaInfeasible, "item " + std::to_string(i) + " alone holds " +
                                                  std::to_string(counts[i]) + " of " + std::to_string(urm.nnz()) +
                                                  " interactions");
    }
  }

  std::vector<std::size_t> order(urm.n_cols());
  std::iota(order.begin(), order.end(), std::size_t{0});
  Rng rng(seed);
  rng.shuffle(order);

  ColdSplit split;
  split.seed = seed;
  split.test_quota = test_quota;
  split.validation_quota = validation_quota;

  std::size_t cursor = 0;
  auto fill = [&](double quota, std::vector<std::size_t>& pool) {
    const double target = quota * total;
    double taken = 0.0;
    while (taken < target && cursor < order.size()) {
      std::size_t item = order[cursor++];
      pool.push_back(item);
      taken += static_cast<double>(counts[item]);
    }
  };
  fill(test_quota, split.cold_test_items);
  fill(validation_quota, split.cold_validation_items);
  std::sort(split.cold_test_items.begin(), split.cold_test_items.end());
  std::sort(split.cold_validation_items.begin(), split.cold_validation_items.end());

  std::vector<bool> in_test(urm.n_cols(), false), in_validation(urm.n_cols(), false), in_train(urm.n_cols(), true);
  for (auto i : split.cold_test_items) in_test[i] = true, in_train[i] = false;
  for (auto i : split.cold_validation_items) in_validation[i] = true, in_train[i] = false;
  split.train = mask_columns(urm, in_train);
  split.validation = mask_columns(urm, in_validation);
  split.test = mask_columns(urm, in_test);
  return split;
}

HoldoutSplit user_holdout_split(const SparseMatrix& m, double quota, std::uint64_t seed) {
  check_fraction(quota, "holdout quota");
  Rng rng(seed);
  std::vector<Triplet> train, validation;
  train.reserve(m.nnz());
  for (std::size_t u = 0; u < m.n_rows(); ++u) {
    auto row = m.row(u);
    // The small slack keeps products like 0.1 * 10 from flooring to 0.
    const auto held = static_cast<std::size_t>(std::floor(quota * static_cast<double>(row.size()) + 1e-9));
    std::vector<bool> to_validation(row.size(), false);
    for (auto pos : rng.sample_without_replacement(row.size(), held)) to_validation[pos] = true;
    for (std::size_t k = 0; k < row.size(); ++k) {
      (to_validation[k] ? validation : train).push_back({u, row.cols[k], row.values[k]});
    }
  }
  return {SparseMatrix::from_triplets(m.n_rows(), m.n_cols(), train),
          SparseMatrix::from_triplets(m.n_rows(), m.n_cols(), validation)};
}

void save_cold_split(const std::filesystem::path& dir, const ColdSplit& split) {
  write_coo(dir / "train.coo", split.train);
  write_coo(dir / "validation.coo", split.validation);
  write_coo(dir / "test.coo", split.test);
  nlohmann::ordered_json sidecar;
  sidecar["seed"] = split.seed;
  sidecar["test_quota"] = split.test_quota;
  sidecar["validation_quota"] = split.validation_quota;
  sidecar["cold_test_items"] = split.cold_test_items;
  sidecar["cold_validation_items"] = split.cold_validation_items;
  write_file_atomic(dir / "split.json", sidecar.dump(2) + "\n");
}

ColdSplit load_cold_split(const std::filesystem::path& dir) {
  ColdSplit split;
  split.train = read_coo(dir / "train.coo");
  split.validation = read_coo(dir / "validation.coo");
  split.test = read_coo(dir / "test.coo");
  try {
    auto sidecar = nlohmann::json::parse(read_text_file(dir / "split.json"));
    split.seed = sidecar.at("seed").get<std::uint64_t>();
    split.test_quota = sidecar.at("test_quota").get<double>();
    split.validation_quota = sidecar.at("validation_quota").get<double>();
    split.cold_test_items = sidecar.at("cold_test_items").get<std::vector<std::size_t>>();
    split.cold_validation_items = sidecar.at("cold_validation_items").get<std::vector<std::size_t>>();
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::ParseError, std::string("split.json: ") + e.what());
  }
  return split;
}

PlantedDataset synth_planted(const SynthConfig& cfg) {
  if (cfg.n_users == 0 || cfg.n_items == 0 || cfg.n_features == 0 || cfg.interactions_per_user == 0) {
    throw Error(ErrorCode::InfeasibleConfig, "synthetic dataset needs users, items, features and interactions");
  }
  if (cfg.n_relevant == 0 || cfg.n_relevant > cfg.n_features) {
    throw Error(ErrorCode::InfeasibleConfig, "n_relevant must lie in [1, n_features]");
  }
  if (cfg.n_items < cfg.n_relevant) {
    throw Error(ErrorCode::InfeasibleConfig, "need at least one item per planted feature");
  }
  if (!(cfg.noise_rate >= 0.0 && cfg.noise_rate <= 1.0) || !(cfg.extra_features_mean >= 0.0)) {
    throw Error(ErrorCode::InfeasibleConfig, "noise_rate must lie in [0, 1] and extra_features_mean >= 0");
  }

  Rng rng(cfg.seed);
  PlantedDataset out;
  out.planted = rng.sample_without_replacement(cfg.n_features, cfg.n_relevant);
  std::sort(out.planted.begin(), out.planted.end());

  std::vector<bool> is_planted(cfg.n_features, false);
  for (auto f : out.planted) is_planted[f] = true;
  std::vector<std::size_t> others;
  for (std::size_t f = 0; f < cfg.n_features; ++f) {
    if (!is_planted[f]) others.push_back(f);
  }

  // The first n_relevant items of a random order cover every planted
  // feature once; the rest draw theirs uniformly.
  std::vector<std::size_t> item_order(cfg.n_items);
  std::iota(item_order.begin(), item_order.end(), std::size_t{0});
  rng.shuffle(item_order);
  out.item_relevant.assign(cfg.n_items, 0);
  for (std::size_t k = 0; k < cfg.n_items; ++k) {
    std::size_t slot = k < cfg.n_relevant ? k : rng.below(cfg.n_relevant);
    out.item_relevant[item_order[k]] = out.planted[slot];
  }

  std::vector<Triplet> icm_entries;
  std::vector<std::vector<std::size_t>> items_with(cfg.n_features);
  for (std::size_t i = 0; i < cfg.n_items; ++i) {
    icm_entries.push_back({i, out.item_relevant[i], 1.0});
    items_with[out.item_relevant[i]].push_back(i);
    if (others.empty()) continue;
    const std::size_t extras = std::min<std::size_t>(rng.poisson(cfg.extra_features_mean), others.size());
    for (auto pos : rng.sample_without_replacement(others.size(), extras)) {
      icm_entries.push_back({i, others[pos], 1.0});
    }
  }

  const auto n_noise = static_cast<std::size_t>(
      std::floor(cfg.noise_rate * static_cast<double>(cfg.interactions_per_user) + 1e-9));
  std::vector<Triplet> urm_entries;
  out.user_preference.resize(cfg.n_users);
  for (std::size_t u = 0; u < cfg.n_users; ++u) {
    const std::size_t preferred = out.planted[rng.below(cfg.n_relevant)];
    out.user_preference[u] = preferred;
    const auto& pool = items_with[preferred];
    for (std::size_t k = 0; k < cfg.interactions_per_user; ++k) {
      std::size_t item = k < n_noise ? rng.below(cfg.n_items) : pool[rng.below(pool.size())];
      urm_entries.push_back({u, item, 1.0});
    }
  }

  std::vector<std::string> users(cfg.n_users), items(cfg.n_items), features(cfg.n_features);
  for (std::size_t u = 0; u < cfg.n_users; ++u) users[u] = "u" + std::to_string(u);
  for (std::size_t i = 0; i < cfg.n_items; ++i) items[i] = "i" + std::to_string(i);
  for (std::size_t f = 0; f < cfg.n_features; ++f) features[f] = "f" + std::to_string(f);

  Dataset& ds = out.dataset;
  ds.urm = SparseMatrix::from_triplets(cfg.n_users, cfg.n_items, urm_entries);
  ds.icm = SparseMatrix::from_triplets(cfg.n_items, cfg.n_features, icm_entries);
  ds.users = IdMap::from_labels(std::move(users));
  ds.items = IdMap::from_labels(std::move(items));
  ds.features = IdMap::from_labels(std::move(features));
  ds.validate();
  return out;
}

}  // namespace cqfs
