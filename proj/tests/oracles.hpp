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

// Dense from-scratch reference implementations used by the unit and
// acceptance tests. They favour obviousness over speed.

#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <numeric>
#include <vector>

#include "cqfs/qubo.hpp"
#include "cqfs/random.hpp"
#include "cqfs/sparse.hpp"

namespace cqfs::oracle {

using Dense = std::vector<std::vector<double>>;

inline Dense zeros(std::size_t rows, std::size_t cols) { return Dense(rows, std::vector<double>(cols, 0.0)); }

inline Dense dense(const SparseMatrix& m) {
  Dense d = zeros(m.n_rows(), m.n_cols());
  for (const auto& t : m.triplets()) d[t.row][t.col] = t.value;
  return d;
}

inline SparseMatrix sparse(const Dense& d) {
  std::vector<Triplet> t;
  const std::size_t cols = d.empty() ? 0 : d[0].size();
  for (std::size_t r = 0; r < d.size(); ++r) {
    for (std::size_t c = 0; c < cols; ++c) {
      if (d[r][c] != 0.0) t.push_back({static_cast<Index>(r), static_cast<Index>(c), d[r][c]});
    }
  }
  return SparseMatrix::from_triplets(d.size(), cols, t);
}

inline Dense transpose(const Dense& a) {
  Dense t = zeros(a.empty() ? 0 : a[0].size(), a.size());
  for (std::size_t i = 0; i < a.size(); ++i) {
    for (std::size_t j = 0; j < a[i].size(); ++j) t[j][i] = a[i][j];
  }
  return t;
}

inline Dense matmul(const Dense& a, const Dense& b) {
  const std::size_t n = a.size(), m = b.empty() ? 0 : b[0].size(), inner = b.size();
  Dense c = zeros(n, m);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < m; ++j) {
      double acc = 0.0;
      for (std::size_t k = 0; k < inner; ++k) {
        if (a[i][k] != 0.0 && b[k][j] != 0.0) acc += a[i][k] * b[k][j];
      }
      c[i][j] = acc;
    }
  }
  return c;
}

/// Random matrix; each entry is present with probability `density` and drawn
/// from the integers lo..hi (integral) or uniformly from [lo, hi).
inline Dense random_dense(std::size_t rows, std::size_t cols, double density, Rng& rng, double lo, double hi,
                          bool integral) {
  Dense d = zeros(rows, cols);
  for (auto& row : d) {
    for (auto& v : row) {
      if (rng.uniform() >= density) continue;
      v = integral ? lo + static_cast<double>(rng.below(static_cast<std::size_t>(hi - lo + 1))) : rng.uniform(lo, hi);
    }
  }
  return d;
}

inline SparseMatrix random_binary(std::size_t rows, std::size_t cols, double density, Rng& rng) {
  return sparse(random_dense(rows, cols, density, rng, 1, 1, true));
}

/// FPM_fg = sum_i sum_j ICM_if ICM_jg IPM_ij.
inline Dense fpm_triple_sum(const Dense& icm, const Dense& ipm) {
  const std::size_t items = icm.size(), features = icm.empty() ? 0 : icm[0].size();
  Dense out = zeros(features, features);
  for (std::size_t f = 0; f < features; ++f) {
    for (std::size_t g = 0; g < features; ++g) {
      double acc = 0.0;
      for (std::size_t i = 0; i < items; ++i) {
        for (std::size_t j = 0; j < items; ++j) acc += icm[i][f] * icm[j][g] * ipm[i][j];
      }
      out[f][g] = acc;
    }
  }
  return out;
}

/// Keeps the k largest entries of every row, ties to the smaller column.
inline Dense top_k(const Dense& d, std::size_t k) {
  Dense out = zeros(d.size(), d.empty() ? 0 : d[0].size());
  for (std::size_t r = 0; r < d.size(); ++r) {
    std::vector<std::size_t> cols;
    for (std::size_t c = 0; c < d[r].size(); ++c) {
      if (d[r][c] != 0.0) cols.push_back(c);
    }
    std::stable_sort(cols.begin(), cols.end(), [&](std::size_t a, std::size_t b) { return d[r][a] > d[r][b]; });
    for (std::size_t i = 0; i < std::min(k, cols.size()); ++i) out[r][cols[i]] = d[r][cols[i]];
  }
  return out;
}

/// Cosine similarity between the rows of `v`, shrunk, diagonal removed,
/// pruned to top-k.
inline Dense cosine(const Dense& v, std::size_t k, double shrink, bool normalize) {
  const std::size_t n = v.size();
  Dense s = zeros(n, n);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) {
      if (i == j) continue;
      double dot = 0.0, ni = 0.0, nj = 0.0;
      for (std::size_t f = 0; f < v[i].size(); ++f) {
        dot += v[i][f] * v[j][f];
        ni += v[i][f] * v[i][f];
        nj += v[j][f] * v[j][f];
      }
      s[i][j] = normalize ? dot / (std::sqrt(ni) * std::sqrt(nj) + shrink) : dot;
      if (!std::isfinite(s[i][j])) s[i][j] = 0.0;
    }
  }
  return top_k(s, k);
}

/// Item-to-item walk P_iu^alpha * P_ui^alpha, columns over pop^beta,
/// diagonal removed, top-k, optional L1 rows.
inline Dense rp3beta(const Dense& urm, double alpha, double beta, std::size_t k, bool normalize) {
  const std::size_t users = urm.size(), items = urm.empty() ? 0 : urm[0].size();
  Dense pui = zeros(users, items), piu = zeros(items, users);
  for (std::size_t u = 0; u < users; ++u) {
    double sum = 0.0;
    for (std::size_t i = 0; i < items; ++i) sum += urm[u][i];
    for (std::size_t i = 0; i < items; ++i) {
      if (urm[u][i] != 0.0) pui[u][i] = std::pow(urm[u][i] / sum, alpha);
    }
  }
  for (std::size_t i = 0; i < items; ++i) {
    double sum = 0.0;
    for (std::size_t u = 0; u < users; ++u) sum += urm[u][i];
    for (std::size_t u = 0; u < users; ++u) {
      if (urm[u][i] != 0.0) piu[i][u] = std::pow(urm[u][i] / sum, alpha);
    }
  }
  Dense s = zeros(items, items);
  for (std::size_t i = 0; i < items; ++i) {
    for (std::size_t j = 0; j < items; ++j) {
      double acc = 0.0;
      for (std::size_t u = 0; u < users; ++u) acc += piu[i][u] * pui[u][j];
      std::size_t pop = 0;
      for (std::size_t u = 0; u < users; ++u) pop += urm[u][j] != 0.0;
      if (i == j) continue;
      s[i][j] = pop == 0 ? acc : acc / std::pow(static_cast<double>(pop), beta);
    }
  }
  s = top_k(s, k);
  if (normalize) {
    for (auto& row : s) {
      double sum = 0.0;
      for (double v : row) sum += std::abs(v);
      if (sum > 0.0) {
        for (double& v : row) v /= sum;
      }
    }
  }
  return s;
}

/// Ranks candidates by profile * S, ties to the smaller item.
inline std::vector<std::vector<std::size_t>> rank(const Dense& s, const Dense& profiles, std::size_t cutoff,
                                                  bool exclude_seen, const std::vector<std::size_t>& candidates) {
  const Dense scores = matmul(profiles, s);
  std::vector<std::vector<std::size_t>> lists;
  for (std::size_t u = 0; u < profiles.size(); ++u) {
    std::vector<std::size_t> pool;
    for (std::size_t i : candidates) {
      if (!(exclude_seen && profiles[u][i] != 0.0)) pool.push_back(i);
    }
    std::stable_sort(pool.begin(), pool.end(), [&](std::size_t a, std::size_t b) {
      return scores[u][a] > scores[u][b];
    });
    pool.resize(std::min(cutoff, pool.size()));
    lists.push_back(pool);
  }
  return lists;
}

struct Svd {
  Dense u;                    // m x r
  std::vector<double> sigma;  // r, descending
  Dense v;                    // n x r
};

/// One-sided Jacobi SVD of an m x n matrix with m >= n.
inline Svd jacobi_svd(Dense a) {
  const std::size_t m = a.size(), n = a.empty() ? 0 : a[0].size();
  Dense v = zeros(n, n);
  for (std::size_t i = 0; i < n; ++i) v[i][i] = 1.0;
  for (int sweep = 0; sweep < 100; ++sweep) {
    double off = 0.0;
    for (std::size_t p = 0; p + 1 < n; ++p) {
      for (std::size_t q = p + 1; q < n; ++q) {
        double alpha = 0.0, beta = 0.0, gamma = 0.0;
        for (std::size_t i = 0; i < m; ++i) {
          alpha += a[i][p] * a[i][p];
          beta += a[i][q] * a[i][q];
          gamma += a[i][p] * a[i][q];
        }
        if (std::abs(gamma) <= 1e-300) continue;
        off = std::max(off, std::abs(gamma) / std::sqrt(alpha * beta));
        const double zeta = (beta - alpha) / (2.0 * gamma);
        const double t = std::copysign(1.0, zeta) / (std::abs(zeta) + std::sqrt(1.0 + zeta * zeta));
        const double c = 1.0 / std::sqrt(1.0 + t * t), s = c * t;
        for (std::size_t i = 0; i < m; ++i) {
          const double x = a[i][p], y = a[i][q];
          a[i][p] = c * x - s * y;
          a[i][q] = s * x + c * y;
        }
        for (std::size_t i = 0; i < n; ++i) {
          const double x = v[i][p], y = v[i][q];
          v[i][p] = c * x - s * y;
          v[i][q] = s * x + c * y;
        }
      }
    }
    if (off < 1e-15) break;
  }
  std::vector<double> sigma(n);
  for (std::size_t j = 0; j < n; ++j) {
    double acc = 0.0;
    for (std::size_t i = 0; i < m; ++i) acc += a[i][j] * a[i][j];
    sigma[j] = std::sqrt(acc);
  }
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(), [&](std::size_t x, std::size_t y) { return sigma[x] > sigma[y]; });
  Svd out{zeros(m, n), std::vector<double>(n), zeros(n, n)};
  for (std::size_t k = 0; k < n; ++k) {
    const std::size_t j = order[k];
    out.sigma[k] = sigma[j];
    for (std::size_t i = 0; i < m; ++i) out.u[i][k] = sigma[j] > 0.0 ? a[i][j] / sigma[j] : 0.0;
    for (std::size_t i = 0; i < n; ++i) out.v[i][k] = v[i][j];
  }
  return out;
}

inline double frobenius_distance(const Dense& a, const Dense& b) {
  double acc = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    for (std::size_t j = 0; j < a[i].size(); ++j) acc += (a[i][j] - b[i][j]) * (a[i][j] - b[i][j]);
  }
  return std::sqrt(acc);
}

/// x^T Q x + offset straight from the definition.
inline double energy(const Dense& q, double offset, const std::vector<std::uint8_t>& x) {
  double e = offset;
  for (std::size_t f = 0; f < q.size(); ++f) {
    for (std::size_t g = 0; g < q.size(); ++g) e += q[f][g] * x[f] * x[g];
  }
  return e;
}

inline std::vector<std::uint8_t> decode(std::uint64_t code, std::size_t n) {
  std::vector<std::uint8_t> x(n);
  for (std::size_t f = 0; f < n; ++f) x[f] = static_cast<std::uint8_t>((code >> f) & 1U);
  return x;
}

struct Optimum {
  double energy;
  std::uint64_t code;
};

/// Plain 2^n enumeration; ties (within `tol`) keep the smaller code.
inline Optimum brute_force(const QuboProblem& p, double tol = 1e-9) {
  const Dense q = [&] {
    Dense d = zeros(p.n(), p.n());
    for (std::size_t f = 0; f < p.n(); ++f) {
      for (std::size_t g = 0; g < p.n(); ++g) d[f][g] = p.coefficient(f, g);
    }
    return d;
  }();
  Optimum best{energy(q, p.offset(), decode(0, p.n())), 0};
  for (std::uint64_t code = 1; code < (std::uint64_t{1} << p.n()); ++code) {
    const double e = energy(q, p.offset(), decode(code, p.n()));
    if (e < best.energy - tol) best = {e, code};
  }
  return best;
}

inline QuboProblem random_qubo(std::size_t n, Rng& rng, double lo = -1.0, double hi = 1.0) {
  DenseMatrix q(n, n);
  for (std::size_t f = 0; f < n; ++f) {
    for (std::size_t g = f; g < n; ++g) {
      const double v = rng.uniform(lo, hi);
      q(f, g) = v;
      q(g, f) = v;
    }
  }
  return QuboProblem(std::move(q), 0.0);
}

inline std::uint64_t encode(const std::vector<std::uint8_t>& x) {
  std::uint64_t code = 0;
  for (std::size_t f = 0; f < x.size(); ++f) code |= static_cast<std::uint64_t>(x[f] != 0) << f;
  return code;
}

}  // namespace cqfs::oracle
