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

#include <atomic>
#include <numeric>
#include <set>
#include <stdexcept>

#include "cqfs/parallel.hpp"
#include "cqfs/random.hpp"

using namespace cqfs;
using Catch::Approx;

TEST_CASE("same seed, same stream", "[random]") {
  Rng a(42), b(42), c(43);
  bool differs = false;
  for (int i = 0; i < 100; ++i) {
    const auto x = a.next();
    REQUIRE(x == b.next());
    differs = differs || x != c.next();
  }
  REQUIRE(differs);
}

TEST_CASE("numbered streams are independent and reproducible", "[random]") {
  Rng s0(7, 0), s1(7, 1), again(7, 1);
  REQUIRE(s0.next() != s1.next());
  Rng fresh(7, 1);
  REQUIRE(fresh.next() == again.next());
}

TEST_CASE("uniform and below stay in range", "[random]") {
  Rng rng(1);
  double sum = 0.0;
  for (int i = 0; i < 20000; ++i) {
    const double u = rng.uniform();
    REQUIRE(u >= 0.0);
    REQUIRE(u < 1.0);
    sum += u;
    REQUIRE(rng.below(7) < 7);
  }
  REQUIRE(sum / 20000 == Approx(0.5).margin(0.01));
}

TEST_CASE("normal and poisson moments", "[random]") {
  Rng rng(5);
  const int n = 40000;
  double m = 0.0, m2 = 0.0, p = 0.0;
  for (int i = 0; i < n; ++i) {
    const double z = rng.normal();
    m += z;
    m2 += z * z;
    p += rng.poisson(2.0);
  }
  REQUIRE(m / n == Approx(0.0).margin(0.02));
  REQUIRE(m2 / n == Approx(1.0).margin(0.03));
  REQUIRE(p / n == Approx(2.0).margin(0.03));
  REQUIRE(rng.poisson(0.0) == 0U);
}

TEST_CASE("sample_without_replacement draws distinct values", "[random]") {
  Rng rng(9);
  for (auto [n, k] : {std::pair<std::size_t, std::size_t>{10, 10}, {100, 3}, {1000, 40}, {5, 0}}) {
    const auto s = rng.sample_without_replacement(n, k);
    REQUIRE(s.size() == k);
    std::set<std::size_t> unique(s.begin(), s.end());
    REQUIRE(unique.size() == k);
    for (auto v : s) REQUIRE(v < n);
  }
  REQUIRE_THROWS(rng.sample_without_replacement(3, 4));
}

TEST_CASE("shuffle permutes", "[random]") {
  Rng rng(4);
  std::vector<int> v(50);
  std::iota(v.begin(), v.end(), 0);
  auto w = v;
  rng.shuffle(w);
  REQUIRE(w != v);
  std::sort(w.begin(), w.end());
  REQUIRE(w == v);
}

TEST_CASE("parallel_for visits every index once", "[random]") {
  for (std::size_t workers : {1, 3, 8}) {
    std::vector<std::atomic<int>> hits(257);
    parallel_for(hits.size(), workers, [&](std::size_t i) { hits[i]++; });
    for (auto& h : hits) REQUIRE(h.load() == 1);
  }
  REQUIRE(resolve_workers(0) >= 1);
  REQUIRE(resolve_workers(3) == 3);
}

TEST_CASE("parallel_for rethrows", "[random]") {
  REQUIRE_THROWS_AS(parallel_for(10, 4,
                                 [](std::size_t i) {
                                   if (i == 6) throw std::runtime_error("boom");
                                 }),
                    std::runtime_error);
}
