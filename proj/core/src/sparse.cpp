// Copyright 2026 The CFO Authors. All rights reserved.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "cfo/sparse.hpp"

#include <Eigen/Sparse>
#include <Eigen/SparseLU>

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdio>
#include <numeric>
#include <optional>
#include <ostream>
#include <stdexcept>
#include <string>

#include "cfo/error.hpp"

namespace cfo {

SparseMatrix SparseMatrix::from_triplets(int n,
                                         std::span<const Triplet> triplets) {
  if (n < 0) throw std::out_of_range("negative matrix dimension");
  for (const auto& t : triplets) {
    if (t.row < 0 || t.row >= n || t.col < 0 || t.col >= n) {
      throw std::out_of_range("triplet (" + std::to_string(t.row) + ", " +
                              std::to_string(t.col) +
                              ") outside matrix of dimension " +
                              std::to_string(n));
    }
  }

  // Counting sort by row, then a stable sort by column inside each row, so
  // duplicates are summed in insertion order.
  std::vector<int> count(static_cast<std::size_t>(n) + 1, 0);
  for (const auto& t : triplets) ++count[t.row + 1];
  std::partial_sum(count.begin(), count.end(), count.begin());
  std::vector<int> order(triplets.size());
  {
    std::vector<int> next(count.begin(), count.end() - 1);
    for (std::size_t i = 0; i < triplets.size(); ++i) {
      order[next[triplets[i].row]++] = static_cast<int>(i);
    }
  }

  SparseMatrix m;
  m.n_ = n;
  m.row_offsets_.assign(static_cast<std::size_t>(n) + 1, 0);
  m.columns_.reserve(triplets.size());
  m.values_.reserve(triplets.size());
  for (int r = 0; r < n; ++r) {
    const auto first = order.begin() + count[r];
    const auto last = order.begin() + count[r + 1];
    std::stable_sort(first, last, [&](int a, int b) {
      return triplets[a].col < triplets[b].col;
    });
    for (auto it = first; it != last; ++it) {
      const auto& t = triplets[*it];
      if (!m.columns_.empty() &&
          static_cast<int>(m.columns_.size()) > m.row_offsets_[r] &&
          m.columns_.back() == t.col) {
        m.values_.back() += t.value;
      } else {
        m.columns_.push_back(t.col);
        m.values_.push_back(t.value);
      }
    }
    m.row_offsets_[r + 1] = static_cast<int>(m.columns_.size());
  }
  return m;
}

double SparseMatrix::coeff(int row, int col) const {
  const auto first = columns_.begin() + row_offsets_[row];
  const auto last = columns_.begin() + row_offsets_[row + 1];
  const auto it = std::lower_bound(first, last, col);
  if (it == last || *it != col) return 0.0;
  return values_[it - columns_.begin()];
}

double SparseMatrix::max_abs() const {
  double m = 0.0;
  for (double v : values_) m = std::max(m, std::abs(v));
  return m;
}

double SparseMatrix::asymmetry() const {
  double worst = 0.0;
  for (int r = 0; r < n_; ++r) {
    for (int k = row_offsets_[r]; k < row_offsets_[r + 1]; ++k) {
      worst = std::max(worst, std::abs(values_[k] - coeff(columns_[k], r)));
    }
  }
  return worst;
}

SparseMatrix SparseMatrix::symmetric_scaled(std::span<const double> d) const {
  if (d.size() != static_cast<std::size_t>(n_)) {
    throw std::invalid_argument("scaling vector size does not match");
  }
  SparseMatrix out = *this;
  for (int r = 0; r < n_; ++r) {
    for (int k = row_offsets_[r]; k < row_offsets_[r + 1]; ++k) {
      out.values_[k] = d[r] * values_[k] * d[columns_[k]];
    }
  }
  return out;
}

std::vector<double> matvec(const SparseMatrix& a, std::span<const double> x) {
  if (x.size() != static_cast<std::size_t>(a.dimension())) {
    throw std::invalid_argument("matvec dimension mismatch: matrix " +
                                std::to_string(a.dimension()) + ", vector " +
                                std::to_string(x.size()));
  }
  const auto rows = a.row_offsets();
  const auto cols = a.column_indices();
  const auto vals = a.values();
  std::vector<double> y(a.dimension(), 0.0);
  for (int r = 0; r < a.dimension(); ++r) {
    double acc = 0.0;
    for (int k = rows[r]; k < rows[r + 1]; ++k) acc += vals[k] * x[cols[k]];
    y[r] = acc;
  }
  return y;
}

double norm2(std::span<const double> v) {
  double acc = 0.0;
  for (double x : v) acc += x * x;
  return std::sqrt(acc);
}

namespace {

std::string format_g(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.3e", v);
  return buf;
}

using EigenCsc = Eigen::SparseMatrix<double, Eigen::ColMajor, int>;
using EigenLu = Eigen::SparseLU<EigenCsc, Eigen::COLAMDOrdering<int>>;

EigenCsc to_eigen(const SparseMatrix& a) {
  const int n = a.dimension();
  // CSR of A read as CSC is A^T; transpose back.
  const Eigen::Map<const EigenCsc> at(n, n, a.nonzeros(),
                                      a.row_offsets().data(),
                                      a.column_indices().data(),
                                      a.values().data());
  return at.transpose();
}

double one_norm(const SparseMatrix& a) {
  std::vector<double> col(a.dimension(), 0.0);
  const auto cols = a.column_indices();
  const auto vals = a.values();
  for (std::size_t k = 0; k < vals.size(); ++k) col[cols[k]] += std::abs(vals[k]);
  return col.empty() ? 0.0 : *std::max_element(col.begin(), col.end());
}

// Symmetric Ruiz equilibration: D such that the rows of D A D have max norm
// close to one.
std::vector<double> equilibration(const SparseMatrix& a) {
  const int n = a.dimension();
  const auto rows = a.row_offsets();
  const auto cols = a.column_indices();
  const auto vals = a.values();
  std::vector<double> d(n, 1.0);
  std::vector<double> row_max(n);
  for (int iter = 0; iter < 20; ++iter) {
    double worst = 0.0;
    for (int r = 0; r < n; ++r) {
      double m = 0.0;
      for (int k = rows[r]; k < rows[r + 1]; ++k) {
        m = std::max(m, std::abs(d[r] * vals[k] * d[cols[k]]));
      }
      row_max[r] = m;
      worst = std::max(worst, std::abs(1.0 - m));
    }
    if (worst < 1e-2) break;
    for (int r = 0; r < n; ++r) {
      if (row_max[r] > 0.0) d[r] /= std::sqrt(row_max[r]);
    }
  }
  return d;
}

// Hager's estimate of ||A^-1||_1 for a symmetric A.
double inverse_one_norm(const EigenLu& lu, int n) {
  Eigen::VectorXd x = Eigen::VectorXd::Constant(n, 1.0 / n);
  double estimate = 0.0;
  for (int iter = 0; iter < 5; ++iter) {
    const Eigen::VectorXd y = lu.solve(x);
    estimate = y.lpNorm<1>();
    Eigen::VectorXd xi(n);
    for (int i = 0; i < n; ++i) xi[i] = y[i] >= 0.0 ? 1.0 : -1.0;
    const Eigen::VectorXd z = lu.solve(xi);
    Eigen::Index j = 0;
    const double zmax = z.cwiseAbs().maxCoeff(&j);
    if (zmax <= z.dot(x)) break;
    x.setZero();
    x[j] = 1.0;
  }
  return estimate;
}

}  // namespace

struct SymmetricIndefiniteSolver::Impl {
  SparseMatrix matrix;
  std::vector<double> scale;
  std::optional<DenseLdlt> dense;
  std::unique_ptr<EigenLu> lu;
  bool analyzed = false;
  bool factorized = false;
};

SymmetricIndefiniteSolver::SymmetricIndefiniteSolver()
    : impl_(std::make_unique<Impl>()) {}
SymmetricIndefiniteSolver::~SymmetricIndefiniteSolver() = default;
SymmetricIndefiniteSolver::SymmetricIndefiniteSolver(
    SymmetricIndefiniteSolver&&) noexcept = default;
SymmetricIndefiniteSolver& SymmetricIndefiniteSolver::operator=(
    SymmetricIndefiniteSolver&&) noexcept = default;

bool SymmetricIndefiniteSolver::uses_dense_path() const {
  return impl_->dense.has_value();
}

void SymmetricIndefiniteSolver::factorize(const SparseMatrix& a) {
  Impl& s = *impl_;
  s.factorized = false;
  s.dense.reset();
  const int n = a.dimension();
  s.scale = equilibration(a);
  const SparseMatrix scaled = a.symmetric_scaled(s.scale);

  if (n <= kDenseFallbackDimension) {
    std::vector<double> dense(static_cast<std::size_t>(n) * n, 0.0);
    const auto rows = scaled.row_offsets();
    const auto cols = scaled.column_indices();
    const auto vals = scaled.values();
    for (int r = 0; r < n; ++r) {
      for (int k = rows[r]; k < rows[r + 1]; ++k) {
        dense[std::size_t(r) * n + cols[k]] = vals[k];
      }
    }
    s.dense.emplace(std::move(dense), n);
    s.matrix = a;
    s.analyzed = false;
    s.factorized = true;
    return;
  }

  const bool reuse = s.analyzed && s.lu && s.matrix.same_pattern(a);
  s.matrix = a;
  const EigenCsc m = to_eigen(scaled);
  if (!reuse) {
    s.lu = std::make_unique<EigenLu>();
    s.lu->analyzePattern(m);
    s.analyzed = true;
  }
  s.lu->factorize(m);
  if (s.lu->info() != Eigen::Success) {
    throw SolverError("sparse factorization failed: " + s.lu->lastErrorMessage());
  }
  const double rcond = 1.0 / (one_norm(scaled) * inverse_one_norm(*s.lu, n));
  if (!(rcond > kPivotTolerance)) {
    throw SolverError("factorization is ill-conditioned: estimated rcond " +
                      format_g(rcond) + " below tolerance");
  }
  s.factorized = true;
}

std::vector<double> SymmetricIndefiniteSolver::solve(
    std::span<const double> b) const {
  const Impl& s = *impl_;
  if (!s.factorized) throw SolverError("solve called before factorize");
  const int n = s.matrix.dimension();
  if (b.size() != static_cast<std::size_t>(n)) {
    throw std::invalid_argument("right-hand side size does not match");
  }

  // x = D (D A D)^-1 D r
  const auto scaled_solve = [&](std::span<const double> r) {
    std::vector<double> y(n);
    for (int i = 0; i < n; ++i) y[i] = s.scale[i] * r[i];
    if (s.dense) {
      y = s.dense->solve(y);
    } else {
      Eigen::Map<Eigen::VectorXd> v(y.data(), n);
      v = s.lu->solve(Eigen::VectorXd(v));
    }
    for (int i = 0; i < n; ++i) y[i] *= s.scale[i];
    return y;
  };
  const auto residual = [&](std::span<const double> x) {
    std::vector<double> r = matvec(s.matrix, x);
    for (int i = 0; i < n; ++i) r[i] = b[i] - r[i];
    return r;
  };

  std::vector<double> x = scaled_solve(b);
  const std::vector<double> correction = scaled_solve(residual(x));
  for (int i = 0; i < n; ++i) x[i] += correction[i];

  const double bound = 1e-9 * (s.matrix.max_abs() * norm2(x) + norm2(b));
  const double res = norm2(residual(x));
  if (!(res <= bound)) {
    throw SolverError("solution residual " + format_g(res) +
                      " exceeds bound " + format_g(bound));
  }
  return x;
}

std::vector<double> solve_symmetric_indefinite(const SparseMatrix& a,
                                               std::span<const double> b) {
  SymmetricIndefiniteSolver solver;
  solver.factorize(a);
  return solver.solve(b);
}

void write_matrix_market(std::ostream& out, const SparseMatrix& a) {
  const auto old_precision = out.precision(17);
  out << "%%MatrixMarket matrix coordinate real general\n";
  out << a.dimension() << ' ' << a.dimension() << ' ' << a.nonzeros() << '\n';
  const auto rows = a.row_offsets();
  const auto cols = a.column_indices();
  const auto vals = a.values();
  for (int r = 0; r < a.dimension(); ++r) {
    for (int k = rows[r]; k < rows[r + 1]; ++k) {
      out << r + 1 << ' ' << cols[k] + 1 << ' ' << vals[k] << '\n';
    }
  }
  out.precision(old_precision);
}

}  // namespace cfo
