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
#include <span>
#include <vector>

#include "cqfs/dense.hpp"
#include "cqfs/sparse.hpp"

namespace cqfs {

/// Binary assignment; entries are 0 or 1.
using Assignment = std::vector<std::uint8_t>;

/// Minimize x^T Q x + offset over binary x, with Q stored symmetric.
///
/// The energy is literally x^T Q x, so an off-diagonal pair (f, g) with f != g
/// contributes 2 * Q(f, g) when both variables are set.
class QuboProblem {
 public:
  QuboProblem() = default;

  /// Zero problem over n variables.
  explicit QuboProblem(std::size_t n) : q_(n, n), offset_(0.0) {}

  /// Throws InvalidArgument unless q is square, exactly symmetric and finite.
  QuboProblem(DenseMatrix q, double offset);

  std::size_t n() const { return q_.rows; }
  const DenseMatrix& q() const { return q_; }
  double offset() const { return offset_; }
  double coefficient(std::size_t f, std::size_t g) const { return q_(f, g); }

  /// Largest |Q(f, g)| and smallest nonzero |Q(f, g)| (both 0 for a zero Q).
  double max_abs_coefficient() const;
  double min_nonzero_abs_coefficient() const;

  bool operator==(const QuboProblem&) const = default;

 private:
  DenseMatrix q_;
  double offset_ = 0.0;
};

/// x^T Q x + offset. Throws DimensionMismatch.
double energy(const QuboProblem& problem, std::span<const std::uint8_t> x);

/// Entry in the upper-triangular (i <= j) convention where each pair appears
/// once with its full weight.
struct UpperTriangularTerm {
  std::size_t i;
  std::size_t j;
  double value;
};

/// Nonzero terms u with sum_{i<=j} u_ij x_i x_j == x^T Q x.
std::vector<UpperTriangularTerm> to_upper_triangular(const QuboProblem& problem);

/// Inverse of to_upper_triangular.
QuboProblem from_upper_triangular(std::size_t n, std::span<const UpperTriangularTerm> terms, double offset);

/// `<stem>.coo` holds Q (symmetric) and `<stem>.json` the
/// {"n", "offset", "convention": "symmetric"} sidecar.
void save_qubo(const std::filesystem::path& stem, const QuboProblem& problem);
QuboProblem load_qubo(const std::filesystem::path& stem);

}  // namespace cqfs
