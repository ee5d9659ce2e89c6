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

#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <map>
#include <string>
#include <variant>
#include <vector>

#include "cqfs/random.hpp"

namespace cqfs {

enum class Distribution { UniformInt, Uniform, LogUniform, Categorical };

using ParamValue = std::variant<std::int64_t, double, bool, std::string>;

/// One named hyperparameter. Numeric distributions use [low, high];
/// Categorical draws uniformly from `choices`.
struct ParamSpec {
  std::string name;
  Distribution distribution = Distribution::Uniform;
  double low = 0.0;
  double high = 0.0;
  std::vector<ParamValue> choices;

  ParamValue sample(Rng& rng) const;
  void validate() const;
};

using ParamPoint = std::map<std::string, ParamValue>;

struct SearchSpace {
  std::vector<ParamSpec> params;

  ParamPoint sample(Rng& rng) const;
  const ParamSpec* find(const std::string& name) const;
  /// Replaces the spec of the same name, or appends.
  void set(ParamSpec spec);
};

std::int64_t get_int(const ParamPoint& point, const std::string& name);
double get_real(const ParamPoint& point, const std::string& name);
bool get_bool(const ParamPoint& point, const std::string& name);
const std::string& get_string(const ParamPoint& point, const std::string& name);
std::string to_string(const ParamValue& value);
std::string to_string(const ParamPoint& point);

/// ItemKNN: topK 5-1000, shrink 0-1000 (uniform), normalize, weighting.
SearchSpace itemknn_space();
/// PureSVD: num_factors 1-350.
SearchSpace puresvd_space();
/// RP3beta: topK 5-1000, alpha 0-2, beta 0-2, normalize.
SearchSpace rp3beta_space();

struct SearchResult {
  std::vector<ParamPoint> cases;
  std::vector<double> scores;
  std::size_t best_index = 0;

  const ParamPoint& best() const { return cases.at(best_index); }
  double best_score() const { return scores.at(best_index); }
};

/// Samples n_cases points up front from `seed`, evaluates them (in parallel
/// when workers > 1) and returns the argmax. Ties, and NaN scores, resolve to
/// the earlier case.
SearchResult random_search(const SearchSpace& space, std::size_t n_cases,
                           const std::function<double(const ParamPoint&)>& objective, std::uint64_t seed,
                           std::size_t workers = 1);

}  // namespace cqfs
