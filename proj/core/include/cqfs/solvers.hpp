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
#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

#include "cqfs/qubo.hpp"

namespace cqfs {

enum class SolverKind { Exhaustive, SimulatedAnnealing };

std::string_view to_string(SolverKind kind);
SolverKind parse_solver_kind(std::string_view text);

struct SelectionResult {
  Assignment x;
  /// x^T Q x + offset, recomputed from scratch.
  double energy = 0.0;
  SolverKind solver = SolverKind::Exhaustive;
  std::uint64_t seed = 0;
  std::size_t samples_drawn = 0;
  double wall_time_s = 0.0;

  std::size_t count_selected() const;
  std::vector<std::size_t> selected() const;
};

/// Geometric inverse-temperature schedule for single-flip Metropolis.
struct AnnealSchedule {
  std::size_t sweeps = 1000;
  double beta_start = 0.1;
  double beta_end = 50.0;
  /// Restarts per solve_sa call. solve_sa takes its sample count explicitly,
  /// so this is only carried for reporting.
  std::size_t restarts = 1;

  /// Throws InvalidArgument unless sweeps >= 1 and 0 < beta_start <= beta_end.
  void validate() const;
};

inline constexpr std::size_t kDefaultNumSamples = 100;
inline constexpr std::size_t kExhaustiveMaxVariables = 25;

/// sweeps = max(1000, 50 n); beta_start = 0.1 / max_abs; beta_end = 50 / min_abs,
/// raised to beta_start if needed.
AnnealSchedule default_schedule(std::size_t n, double max_abs_coefficient = 1.0,
                                double min_nonzero_abs_coefficient = 1.0);

/// default_schedule scaled to the problem's coefficient magnitudes.
AnnealSchedule default_schedule(const QuboProblem& problem);

/// Global minimum over all 2^n assignments, visited in Gray-code order with
/// O(n) incremental updates. Ties go to the smaller integer encoding
/// (bit f = x_f). Throws TooLarge for n > 25.
SelectionResult solve_exhaustive(const QuboProblem& problem);

/// num_samples independent annealing runs, each from a random start with its
/// own generator derived from (seed, sample index). Each run sweeps the
/// variables in a fresh random order per sweep and returns the best state it
/// visited. Results are sorted by energy (ties by sample index). The output
/// does not depend on `workers`.
std::vector<SelectionResult> solve_sa(const QuboProblem& problem, const AnnealSchedule& schedule,
                                      std::size_t num_samples, std::uint64_t seed, std::size_t workers = 1);

/// Energy change of flipping variable f given the local field
/// h_f = sum_{g != f} Q(f, g) x_g.
inline double flip_delta(double diagonal, double local_field, std::uint8_t current) {
  return (current ? -1.0 : 1.0) * (diagonal + 2.0 * local_field);
}

void save_selection(const std::filesystem::path& path, const SelectionResult& result);
SelectionResult load_selection(const std::filesystem::path& path);
std::string selection_to_json(const SelectionResult& result, bool include_wall_time = true);

}  // namespace cqfs
