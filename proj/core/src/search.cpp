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

#include "cqfs/search.hpp"

#include <cmath>
#include <limits>

#include "cqfs/error.hpp"
#include "cqfs/io.hpp"
#include "cqfs/parallel.hpp"

namespace cqfs {
namespace {

const ParamValue& lookup(const ParamPoint& point, const std::string& name) {
  auto it = point.find(name);
  if (it == point.end()) throw Error(ErrorCode::InvalidArgument, "missing hyperparameter '" + name + "'");
  return it->second;
}

ParamSpec uniform_int(std::string name, double low, double high) {
  return {std::move(name), Distribution::UniformInt, low, high, {}};
}

ParamSpec uniform(std::string name, double low, double high) {
  return {std::move(name), Distribution::Uniform, low, high, {}};
}

ParamSpec categorical(std::string name, std::vector<ParamValue> choices) {
  return {std::move(name), Distribution::Categorical, 0.0, 0.0, std::move(choices)};
}

}  // namespace

void ParamSpec::validate() const {
  switch (distribution) {
    case Distribution::Categorical:
      if (choices.empty()) throw Error(ErrorCode::ConfigInvalid, name + ": empty choice list");
      return;
    case Distribution::LogUniform:
      if (!(low > 0.0)) throw Error(ErrorCode::ConfigInvalid, name + ": log-uniform needs low > 0");
      [[fallthrough]];
    default:
      if (!(low <= high) || !std::isfinite(low) || !std::isfinite(high)) {
        throw Error(ErrorCode::ConfigInvalid, name + ": needs finite low <= high");
      }
  }
}

ParamValue ParamSpec::sample(Rng& rng) const {
  switch (distribution) {
    case Distribution::UniformInt: {
      const auto lo = static_cast<std::int64_t>(std::ceil(low));
      const auto hi = static_cast<std::int64_t>(std::floor(high));
      return lo + static_cast<std::int64_t>(rng.below(static_cast<std::size_t>(hi - lo + 1)));
    }
    case Distribution::Uniform:
      return rng.uniform(low, high);
    case Distribution::LogUniform:
      return std::exp(rng.uniform(std::log(low), std::log(high)));
    case Distribution::Categorical:
      return choices[rng.below(choices.size())];
  }
  return 0.0;
}

ParamPoint SearchSpace::sample(Rng& rng) const {
  ParamPoint point;
  for (const auto& spec : params) point[spec.name] = spec.sample(rng);
  return point;
}

const ParamSpec* SearchSpace::find(const std::string& name) const {
  for (const auto& spec : params) {
    if (spec.name == name) return &spec;
  }
  return nullptr;
}

void SearchSpace::set(ParamSpec spec) {
  spec.validate();
  for (auto& existing : params) {
    if (existing.name == spec.name) {
      existing = std::move(spec);
      return;
    }
  }
  params.push_back(std::move(spec));
}

std::int64_t get_int(const ParamPoint& point, const std::string& name) {
  const auto& v = lookup(point, name);
  if (auto i = std::get_if<std::int64_t>(&v)) return *i;
  if (auto d = std::get_if<double>(&v)) return static_cast<std::int64_t>(std::llround(*d));
  throw Error(ErrorCode::InvalidArgument, name + " is not numeric");
}

double get_real(const ParamPoint& point, const std::string& name) {
  const auto& v = lookup(point, name);
  if (auto d = std::get_if<double>(&v)) return *d;
  if (auto i = std::get_if<std::int64_t>(&v)) return static_cast<double>(*i);
  throw Error(ErrorCode::InvalidArgument, name + " is not numeric");
}

bool get_bool(const ParamPoint& point, const std::string& name) {
  if (auto b = std::get_if<bool>(&lookup(point, name))) return *b;
  throw Error(ErrorCode::InvalidArgument, name + " is not a flag");
}

const std::string& get_string(const ParamPoint& point, const std::string& name) {
  if (auto s = std::get_if<std::string>(&lookup(point, name))) return *s;
  throw Error(ErrorCode::InvalidArgument, name + " is not a string");
}

std::string to_string(const ParamValue& value) {
  return std::visit(
      [](const auto& v) -> std::string {
        using T = std::decay_t<decltype(v)>;
        if constexpr (std::is_same_v<T, bool>) return v ? "true" : "false";
        else if constexpr (std::is_same_v<T, std::string>) return v;
        else if constexpr (std::is_same_v<T, double>) return format_real(v);
        else return std::to_string(v);
      },
      value);
}

std::string to_string(const ParamPoint& point) {
  std::string out;
  for (const auto& [name, value] : point) {
    if (!out.empty()) out += ' ';
    out += name + '=' + to_string(value);
  }
  return out;
}

SearchSpace itemknn_space() {
  return {{uniform_int("topK", 5, 1000), uniform("shrink", 0, 1000),
           categorical("normalize", {ParamValue(true), ParamValue(false)}),
           categorical("weighting", {ParamValue(std::string("none")), ParamValue(std::string("tfidf")),
                                     ParamValue(std::string("bm25"))})}};
}

SearchSpace puresvd_space() { return {{uniform_int("num_factors", 1, 350)}}; }

SearchSpace rp3beta_space() {
  return {{uniform_int("topK", 5, 1000), uniform("alpha", 0, 2), uniform("beta", 0, 2),
           categorical("normalize", {ParamValue(true), ParamValue(false)})}};
}

SearchResult random_search(const SearchSpace& space, std::size_t n_cases,
                           const std::function<double(const ParamPoint&)>& objective, std::uint64_t seed,
                           std::size_t workers) {
  if (n_cases == 0) throw Error(ErrorCode::InvalidArgument, "random_search needs n_cases >= 1");
  for (const auto& spec : space.params) spec.validate();

  SearchResult result;
  Rng rng(seed);
  for (std::size_t c = 0; c < n_cases; ++c) result.cases.push_back(space.sample(rng));

  result.scores.assign(n_cases, 0.0);
  parallel_for(n_cases, workers, [&](std::size_t c) { result.scores[c] = objective(result.cases[c]); });

  double best = -std::numeric_limits<double>::infinity();
  bool found = false;
  for (std::size_t c = 0; c < n_cases; ++c) {
    if (std::isnan(result.scores[c])) continue;
    if (!found || result.scores[c] > best) {
      best = result.scores[c];
      result.best_index = c;
      found = true;
    }
  }
  return result;
}

}  // namespace cqfs
