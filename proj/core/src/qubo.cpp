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

#include "cqfs/qubo.hpp"

#include <cmath>
#include <string>

#include <json.hpp>

#include "cqfs/error.hpp"
#include "cqfs/io.hpp"

namespace cqfs {

QuboProblem::QuboProblem(DenseMatrix q, double offset) : q_(std::move(q)), offset_(offset) {
  if (q_.rows != q_.cols) throw Error(ErrorCode::InvalidArgument, "QUBO matrix must be square");
  if (!std::isfinite(offset_)) throw Error(ErrorCode::InvalidArgument, "QUBO offset must be finite");
  for (std::size_t f = 0; f < q_.rows; ++f) {
    for (std::size_t g = 0; g < q_.cols; ++g) {
      if (!std::isfinite(q_(f, g))) throw Error(ErrorCode::InvalidArgument, "QUBO coefficient not finite");
      if (q_(f, g) != q_(g, f)) throw Error(ErrorCode::InvalidArgument, "QUBO matrix must be symmetric");
    }
  }
}

double QuboProblem::max_abs_coefficient() const {
  double best = 0.0;
  for (double v : q_.data) best = std::max(best, std::abs(v));
  return best;
}

double QuboProblem::min_nonzero_abs_coefficient() const {
  double best = 0.0;
  for (double v : q_.data) {
    double a = std::abs(v);
    if (a > 0.0 && (best == 0.0 || a < best)) best = a;
  }
  return best;
}

double energy(const QuboProblem& problem, std::span<const std::uint8_t> x) {
  const std::size_t n = problem.n();
  if (x.size() != n) {
    throw Error(ErrorCode::DimensionMismatch,
                "assignment has " + std::to_string(x.size()) + " variables, problem has " + std::to_string(n));
  }
  double total = 0.0;
  for (std::size_t f = 0; f < n; ++f) {
    if (!x[f]) continue;
    for (std::size_t g = 0; g < n; ++g) {
      if (x[g]) total += problem.coefficient(f, g);
    }
  }
  return total + problem.offset();
}

std::vector<UpperTriangularTerm> to_upper_triangular(const QuboProblem& problem) {
  std::vector<UpperTriangularTerm> terms;
  for (std::size_t i = 0; i < problem.n(); ++i) {
    for (std::size_t j = i; j < problem.n(); ++j) {
      double v = problem.coefficient(i, j);
      if (v == 0.0) continue;
      terms.push_back({i, j, i == j ? v : 2.0 * v});
    }
  }
  return terms;
}

QuboProblem from_upper_triangular(std::size_t n, std::span<const UpperTriangularTerm> terms, double offset) {
  DenseMatrix q(n, n);
  for (const auto& t : terms) {
    if (t.i >= n || t.j >= n) throw Error(ErrorCode::IndexOutOfRange, "upper-triangular term");
    if (t.i == t.j) {
      q(t.i, t.i) += t.value;
    } else {
      q(t.i, t.j) += 0.5 * t.value;
      q(t.j, t.i) += 0.5 * t.value;
    }
  }
  return QuboProblem(std::move(q), offset);
}

void save_qubo(const std::filesystem::path& stem, const QuboProblem& problem) {
  auto coo = stem;
  coo += ".coo";
  auto sidecar = stem;
  sidecar += ".json";
  write_coo(coo, SparseMatrix::from_dense(problem.q()));
  nlohmann::ordered_json j;
  j["n"] = problem.n();
  j["offset"] = problem.offset();
  j["convention"] = "symmetric";
  write_file_atomic(sidecar, j.dump(2) + "\n");
}

QuboProblem load_qubo(const std::filesystem::path& stem) {
  auto coo = stem;
  coo += ".coo";
  auto sidecar = stem;
  sidecar += ".json";
  const SparseMatrix q = read_coo(coo);
  double offset = 0.0;
  try {
    auto j = nlohmann::json::parse(read_text_file(sidecar));
    if (j.at("convention").get<std::string>() != "symmetric") {
      throw Error(ErrorCode::ParseError, "unsupported QUBO convention");
    }
    if (j.at("n").get<std::size_t>() != q.n_rows()) throw Error(ErrorCode::ParseError, "QUBO size mismatch");
    offset = j.at("offset").get<double>();
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::ParseError, sidecar.string() + ": " + e.what());
  }
  return QuboProblem(q.to_dense(), offset);
}

}  // namespace cqfs
