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

#include <benchmark/benchmark.h>

#include <vector>

#include "cqfs/builder.hpp"
#include "cqfs/qubo.hpp"
#include "cqfs/random.hpp"
#include "cqfs/solvers.hpp"
#include "cqfs/sparse.hpp"

namespace {

using namespace cqfs;

SparseMatrix random_sparse(std::size_t rows, std::size_t cols, double density, std::uint64_t seed) {
  Rng rng(seed);
  std::vector<Triplet> t;
  for (std::size_t r = 0; r < rows; ++r) {
    for (std::size_t c = 0; c < cols; ++c) {
      if (rng.uniform() < density) t.push_back({r, c, rng.uniform(-1.0, 1.0)});
    }
  }
  return SparseMatrix::from_triplets(rows, cols, t);
}

QuboProblem random_problem(std::size_t n, std::uint64_t seed) {
  Rng rng(seed);
  DenseMatrix q(n, n);
  for (std::size_t f = 0; f < n; ++f) {
    for (std::size_t g = f; g < n; ++g) q(f, g) = q(g, f) = rng.uniform(-1.0, 1.0);
  }
  return QuboProblem(std::move(q), 0.0);
}

void BM_Exhaustive(benchmark::State& state) {
  const auto problem = random_problem(static_cast<std::size_t>(state.range(0)), 1);
  for (auto _ : state) benchmark::DoNotOptimize(solve_exhaustive(problem));
}
BENCHMARK(BM_Exhaustive)->DenseRange(12, 20, 4)->Unit(benchmark::kMillisecond);

void BM_Anneal(benchmark::State& state) {
  const auto problem = random_problem(static_cast<std::size_t>(state.range(0)), 2);
  const auto schedule = default_schedule(problem);
  for (auto _ : state) benchmark::DoNotOptimize(solve_sa(problem, schedule, 10, 3, 1));
}
BENCHMARK(BM_Anneal)->Arg(40)->Arg(100)->Arg(200)->Unit(benchmark::kMillisecond);

void BM_Matmul(benchmark::State& state) {
  const auto n = static_cast<std::size_t>(state.range(0));
  const auto a = random_sparse(n, n, 0.02, 4);
  const auto b = random_sparse(n, n, 0.02, 5);
  for (auto _ : state) benchmark::DoNotOptimize(matmul(a, b));
}
BENCHMARK(BM_Matmul)->Arg(500)->Arg(2000)->Unit(benchmark::kMillisecond);

void BM_BuildFpm(benchmark::State& state) {
  const auto items = static_cast<std::size_t>(state.range(0));
  const auto icm = random_sparse(items, 100, 0.05, 6);
  const auto ipm = random_sparse(items, items, 0.01, 7);
  for (auto _ : state) benchmark::DoNotOptimize(build_fpm(icm, ipm));
}
BENCHMARK(BM_BuildFpm)->Arg(1000)->Arg(4000)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
