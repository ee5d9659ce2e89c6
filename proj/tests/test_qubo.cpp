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

#include <catch_amalgamated.hpp>

#include <cmath>
#include <filesystem>
#include <limits>

#include "cqfs/error.hpp"
#include "cqfs/qubo.hpp"
#include "oracles.hpp"

using namespace cqfs;
using Catch::Approx;

namespace {

QuboProblem make(std::initializer_list<std::initializer_list<double>> rows, double offset = 0.0) {
  const std::size_t n = rows.size();
  DenseMatrix q(n, n);
  std::size_t r = 0;
  for (auto row : rows) {
    std::size_t c = 0;
    for (double v : row) q(r, c++) = v;
    ++r;
  }
  return QuboProblem(q, offset);
}

}  // namespace

TEST_CASE("energy examples", "[qubo]") {
  auto q = make({{-1, 2}, {2, -1}}, 0.5);
  REQUIRE(energy(q, Assignment{0, 0}) == 0.5);
  REQUIRE(energy(make({{-1, 2}, {2, -1}}), Assignment{1, 1}) == 2.0);
  REQUIRE(energy(q, Assignment{1, 0}) == -0.5);
  REQUIRE(energy(q, Assignment{0, 1}) == -0.5);
  REQUIRE_THROWS_AS(energy(q, Assignment{1}), Error);
}

TEST_CASE("energy matches the definition", "[qubo]") {
  Rng rng(201);
  for (int trial = 0; trial < 30; ++trial) {
    const std::size_t n = 1 + rng.below(10);
    auto p = oracle::random_qubo(n, rng);
    oracle::Dense d = oracle::zeros(n, n);
    for (std::size_t a = 0; a < n; ++a) {
      for (std::size_t b = 0; b < n; ++b) d[a][b] = p.coefficient(a, b);
    }
    for (std::uint64_t code = 0; code < (1ull << n); ++code) {
      auto x = oracle::decode(code, n);
      REQUIRE(energy(p, x) == Approx(oracle::energy(d, p.offset(), x)).margin(1e-12));
    }
  }
}

TEST_CASE("constructor rejects asymmetric or non-finite matrices", "[qubo]") {
  DenseMatrix asym(2, 2);
  asym(0, 1) = 1.0;
  REQUIRE_THROWS_AS(QuboProblem(asym, 0.0), Error);
  DenseMatrix nan(1, 1, std::numeric_limits<double>::quiet_NaN());
  REQUIRE_THROWS_AS(QuboProblem(nan, 0.0), Error);
  REQUIRE_THROWS_AS(QuboProblem(DenseMatrix(2, 3), 0.0), Error);
  REQUIRE(QuboProblem(3).n() == 3);
}

TEST_CASE("coefficient magnitudes", "[qubo]") {
  auto q = make({{-4, 0.5}, {0.5, 0}});
  REQUIRE(q.max_abs_coefficient() == 4.0);
  REQUIRE(q.min_nonzero_abs_coefficient() == 0.5);
  REQUIRE(QuboProblem(2).max_abs_coefficient() == 0.0);
  REQUIRE(QuboProblem(2).min_nonzero_abs_coefficient() == 0.0);
}

TEST_CASE("upper-triangular conversion preserves energies", "[qubo]") {
  auto q = make({{-1, 2}, {2, -1}});
  auto terms = to_upper_triangular(q);
  REQUIRE(terms.size() == 3);
  for (const auto& t : terms) {
    REQUIRE(t.i <= t.j);
    if (t.i != t.j) REQUIRE(t.value == 4.0);
  }

  Rng rng(203);
  for (int trial = 0; trial < 20; ++trial) {
    const std::size_t n = 1 + rng.below(8);
    auto p = oracle::random_qubo(n, rng);
    auto upper = to_upper_triangular(p);
    auto back = from_upper_triangular(n, upper, p.offset());
    for (std::uint64_t code = 0; code < (1ull << n); ++code) {
      auto x = oracle::decode(code, n);
      double direct = p.offset();
      for (const auto& t : upper) direct += t.value * x[t.i] * x[t.j];
      REQUIRE(direct == Approx(energy(p, x)).margin(1e-12));
      REQUIRE(energy(back, x) == Approx(energy(p, x)).margin(1e-12));
    }
  }
}

TEST_CASE("qubo save/load round trip", "[qubo]") {
  Rng rng(207);
  auto p = oracle::random_qubo(7, rng);
  auto dir = std::filesystem::temp_directory_path() / "cqfs_qubo_roundtrip";
  std::filesystem::remove_all(dir);
  save_qubo(dir / "q", p);
  REQUIRE(std::filesystem::exists(dir / "q.coo"));
  REQUIRE(std::filesystem::exists(dir / "q.json"));
  REQUIRE(load_qubo(dir / "q") == p);
  std::filesystem::remove_all(dir);
}
