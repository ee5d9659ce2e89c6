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

#include "cqfs/solvers.hpp"

#include <algorithm>
#include <bit>
#include <chrono>
#include <cmath>
#include <numeric>

#include <json.hpp>

#include "cqfs/error.hpp"
#include "cqfs/io.hpp"
#include "cqfs/parallel.hpp"
#include "cqfs/random.hpp"

namespace cqfs {
namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point start) {
  return std::chrono::duration<double>(Clock::now() - start).count();
}

// Local fields h_f = sum_{g != f} Q(f, g) x_g.
std::vector<double> local_fields(const QuboProblem& problem, const Assignment& x) {
  const std::size_t n = problem.n();
  std::vector<double> h(n, 0.0);
  for (std::size_t f = 0; f < n; ++f) {
    for (std::size_t g = 0; g < n; ++g) {
      if (g != f && x[g]) h[f] += problem.coefficient(f, g);
    }
  }
  return h;
}

void apply_flip(const QuboProblem& problem, Assignment& x, std::vector<double>& h, std::size_t f) {
  const double sign = x[f] ? -1.0 : 1.0;
  x[f] ^= 1;
  const double* row = &problem.q().data[f * problem.n()];
  for (std::size_t g = 0; g < problem.n(); ++g) {
    if (g != f) h[g] += sign * row[g];
  }
}

Assignment decode(std::uint64_t code, std::size_t n) {
  Assignment x(n, 0);
  for (std::size_t f = 0; f < n; ++f) x[f] = static_cast<std::uint8_t>((code >> f) & 1U);
  return x;
}

}  // namespace

std::string_view to_string(SolverKind kind) {
  return kind == SolverKind::Exhaustive ? "exhaustive" : "sa";
}

SolverKind parse_solver_kind(std::string_view text) {
  if (text == "exhaustive") return SolverKind::Exhaustive;
  if (text == "sa" || text == "simulated_annealing") return SolverKind::SimulatedAnnealing;
  throw Error(ErrorCode::ConfigInvalid, "unknown solver '" + std::string(text) + "'");
}

std::size_t SelectionResult::count_selected() const {
  return static_cast<std::size_t>(std::count(x.begin(), x.end(), std::uint8_t{1}));
}

std::vector<std::size_t> SelectionResult::selected() const {
  std::vector<std::size_t> out;
  for (std::size_t f = 0; f < x.size(); ++f) {
    if (x[f]) out.push_back(f);
  }
  return out;
}

void AnnealSchedule::validate() const {
  if (sweeps == 0) throw Error(ErrorCode::InvalidArgument, "schedule needs at least one sweep");
  if (!(beta_start > 0.0) || !(beta_end >= beta_start) || !std::isfinite(beta_end)) {
    throw Error(ErrorCode::InvalidArgument, "schedule needs 0 < beta_start <= beta_end < inf");
  }
}

AnnealSchedule default_schedule(std::size_t n, double max_abs_coefficient, double min_nonzero_abs_coefficient) {
  if (n == 0) throw Error(ErrorCode::InvalidArgument, "default_schedule needs n >= 1");
  AnnealSchedule schedule;
  schedule.sweeps = std::max<std::size_t>(1000, 50 * n);
  const double hot_scale = max_abs_coefficient > 0.0 ? max_abs_coefficient : 1.0;
  const double cold_scale = min_nonzero_abs_coefficient > 0.0 ? min_nonzero_abs_coefficient : 1.0;
  schedule.beta_start = 0.1 / hot_scale;
  schedule.beta_end = std::max(schedule.beta_start, 50.0 / cold_scale);
  return schedule;
}

AnnealSchedule default_schedule(const QuboProblem& problem) {
  return default_schedule(problem.n(), problem.max_abs_coefficient(), problem.min_nonzero_abs_coefficient());
}

SelectionResult solve_exhaustive(const QuboProblem& problem) {
  const auto start = Clock::now();
  const std::size_t n = problem.n();
  if (n > kExhaustiveMaxVariables) {
    throw Error(ErrorCode::TooLarge, std::to_string(n) + " variables exceed the exhaustive cap of " +
                                         std::to_string(kExhaustiveMaxVariables));
  }

  // Incremental energies drift by a few ulps; differences inside this band
  // are treated as ties and resolved by encoding.
  const double tie_band = 1e-10 * std::max(1.0, problem.max_abs_coefficient() * static_cast<double>(n * n));

  Assignment x(n, 0);
  std::vector<double> h(n, 0.0);
  double current = 0.0;
  double best = 0.0;
  std::uint64_t code = 0;
  std::uint64_t best_code = 0;

  const std::uint64_t total = std::uint64_t{1} << n;
  for (std::uint64_t step = 1; step < total; ++step) {
    const auto f = static_cast<std::size_t>(std::countr_zero(step));
    current += flip_delta(problem.coefficient(f, f), h[f], x[f]);
    apply_flip(problem, x, h, f);
    code ^= std::uint64_t{1} << f;

    if ((step & 0xFFFF) == 0) {
      // Periodic resync bounds the accumulated rounding error.
      current = energy(problem, x) - problem.offset();
      h = local_fields(problem, x);
    }
    if (current < best - tie_band) {
      best = current;
      best_code = code;
    } else if (current <= best + tie_band && code < best_code) {
      best = std::min(best, current);
      best_code = code;
    }
  }

  SelectionResult result;
  result.x = decode(best_code, n);
  result.energy = energy(problem, result.x);
  result.solver = SolverKind::Exhaustive;
  result.samples_drawn = 1;
  result.wall_time_s = seconds_since(start);
  return result;
}

std::vector<SelectionResult> solve_sa(const QuboProblem& problem, const AnnealSchedule& schedule,
                                      std::size_t num_samples, std::uint64_t seed, std::size_t workers) {
  schedule.validate();
  if (num_samples == 0) throw Error(ErrorCode::InvalidArgument, "num_samples must be >= 1");
  const auto start = Clock::now();
  const std::size_t n = problem.n();

  std::vector<double> betas(schedule.sweeps);
  for (std::size_t s = 0; s < schedule.sweeps; ++s) {
    const double t = schedule.sweeps == 1 ? 1.0 : static_cast<double>(s) / static_cast<double>(schedule.sweeps - 1);
    betas[s] = schedule.beta_start * std::pow(schedule.beta_end / schedule.beta_start, t);
  }

  std::vector<Assignment> best_states(num_samples);
  parallel_for(num_samples, workers, [&](std::size_t sample) {
    Rng rng(seed, sample);
    Assignment x(n);
    for (auto& bit : x) bit = static_cast<std::uint8_t>(rng.next() >> 63);
    std::vector<double> h = local_fields(problem, x);
    double current = energy(problem, x);
    double best = current;
    Assignment best_x = x;

    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), std::size_t{0});
    for (double beta : betas) {
      rng.shuffle(order);
      for (std::size_t f : order) {
        const double delta = flip_delta(problem.coefficient(f, f), h[f], x[f]);
        if (delta > 0.0 && rng.uniform() >= std::exp(-beta * delta)) continue;
        apply_flip(problem, x, h, f);
        current += delta;
        if (current < best) {
          best = current;
          best_x = x;
        }
      }
    }
    best_states[sample] = std::move(best_x);
  });

  std::vector<SelectionResult> results(num_samples);
  for (std::size_t sample = 0; sample < num_samples; ++sample) {
    auto& r = results[sample];
    r.x = std::move(best_states[sample]);
    r.energy = energy(problem, r.x);
    r.solver = SolverKind::SimulatedAnnealing;
    r.seed = seed;
    r.samples_drawn = num_samples;
  }
  std::stable_sort(results.begin(), results.end(),
                   [](const SelectionResult& a, const SelectionResult& b) { return a.energy < b.energy; });
  const double elapsed = seconds_since(start);
  for (auto& r : results) r.wall_time_s = elapsed;
  return results;
}

std::string selection_to_json(const SelectionResult& result, bool include_wall_time) {
  nlohmann::ordered_json j;
  std::vector<int> bits(result.x.begin(), result.x.end());
  j["x"] = bits;
  j["energy"] = result.energy;
  j["solver"] = std::string(to_string(result.solver));
  j["seed"] = result.seed;
  j["samples_drawn"] = result.samples_drawn;
  if (include_wall_time) j["wall_time_s"] = result.wall_time_s;
  return j.dump(2) + "\n";
}

void save_selection(const std::filesystem::path& path, const SelectionResult& result) {
  write_file_atomic(path, selection_to_json(result));
}

SelectionResult load_selection(const std::filesystem::path& path) {
  SelectionResult r;
  try {
    auto j = nlohmann::json::parse(read_text_file(path));
    for (int bit : j.at("x").get<std::vector<int>>()) {
      if (bit != 0 && bit != 1) throw Error(ErrorCode::ParseError, "selection bits must be 0 or 1");
      r.x.push_back(static_cast<std::uint8_t>(bit));
    }
    r.energy = j.at("energy").get<double>();
    r.solver = parse_solver_kind(j.at("solver").get<std::string>());
    r.seed = j.at("seed").get<std::uint64_t>();
    r.samples_drawn = j.at("samples_drawn").get<std::size_t>();
    r.wall_time_s = j.value("wall_time_s", 0.0);
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::ParseError, path.string() + ": " + e.what());
  }
  return r;
}

}  // namespace cqfs
