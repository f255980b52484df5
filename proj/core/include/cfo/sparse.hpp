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

#ifndef CFO_SPARSE_HPP_
#define CFO_SPARSE_HPP_

#include <cstdint>
#include <iosfwd>
#include <memory>
#include <span>
#include <vector>

namespace cfo {

struct Triplet {
  int row;
  int col;
  double value;
};

// Square matrix in compressed sparse row form. Column indices within each row
// are sorted and unique.
class SparseMatrix {
 public:
  SparseMatrix() = default;

  // Sums duplicates. The layout depends only on the set of (row, col) pairs;
  // duplicates are summed in insertion order. Throws std::out_of_range for
  // indices outside [0, n).
  static SparseMatrix from_triplets(int n, std::span<const Triplet> triplets);

  int dimension() const { return n_; }
  std::size_t nonzeros() const { return values_.size(); }
  std::span<const int> row_offsets() const { return row_offsets_; }
  std::span<const int> column_indices() const { return columns_; }
  std::span<const double> values() const { return values_; }

  // Entry (i, j), zero when not stored.
  double coeff(int row, int col) const;
  double max_abs() const;
  // max |A - A^T| over all entries.
  double asymmetry() const;

  // D A D for the diagonal matrix D = diag(d).
  SparseMatrix symmetric_scaled(std::span<const double> d) const;

  bool same_pattern(const SparseMatrix& other) const {
    return n_ == other.n_ && row_offsets_ == other.row_offsets_ &&
           columns_ == other.columns_;
  }

 private:
  int n_ = 0;
  std::vector<int> row_offsets_{0};
  std::vector<int> columns_;
  std::vector<double> values_;
};

// y = A x. Throws std::invalid_argument on dimension mismatch.
std::vector<double> matvec(const SparseMatrix& a, std::span<const double> x);

double norm2(std::span<const double> v);

// Relative pivot threshold below which a factorization is reported singular.
inline constexpr double kPivotTolerance = 1e-13;
// Systems of at most this dimension use the dense Bunch-Kaufman path.
inline constexpr int kDenseFallbackDimension = 200;

// Factorization of a symmetric (possibly indefinite) sparse matrix.
//
// The matrix is first equilibrated by a symmetric diagonal scaling so that
// every row of D A D has unit max norm, and every solve takes one step of
// iterative refinement against the unscaled matrix.
// Small systems go through a dense LDL^T with Bunch-Kaufman pivoting; larger
// ones through a sparse LU with symmetric fill-reducing ordering. The
// symbolic analysis is cached and reused when the next matrix has the same
// sparsity pattern. Factorization and solves are single threaded and
// deterministic. Throws SolverError on singular or ill-conditioned input.
class SymmetricIndefiniteSolver {
 public:
  SymmetricIndefiniteSolver();
  ~SymmetricIndefiniteSolver();
  SymmetricIndefiniteSolver(SymmetricIndefiniteSolver&&) noexcept;
  SymmetricIndefiniteSolver& operator=(SymmetricIndefiniteSolver&&) noexcept;

  void factorize(const SparseMatrix& a);
  // Solves with the last factorized matrix and checks the residual bound
  // ||Ax - b|| <= 1e-9 (||A||_max ||x|| + ||b||).
  std::vector<double> solve(std::span<const double> b) const;

  bool uses_dense_path() const;

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

std::vector<double> solve_symmetric_indefinite(const SparseMatrix& a,
                                               std::span<const double> b);

// Dense symmetric indefinite factorization P A P^T = L D L^T with 1x1 and
// 2x2 Bunch-Kaufman pivots.
class DenseLdlt {
 public:
  // `a` is row-major n x n; only symmetry of the values is assumed.
  DenseLdlt(std::vector<double> a, int n);

  std::vector<double> solve(std::span<const double> b) const;
  int dimension() const { return n_; }

 private:
  int n_;
  std::vector<double> lower_;   // unit lower factor, row-major
  std::vector<double> diag_;    // block diagonal: d[i][i], d[i+1][i]
  std::vector<double> offdiag_; // sub-diagonal of 2x2 blocks, 0 for 1x1
  std::vector<int> block_size_; // 1 or 2 at the first row of each block
  std::vector<int> perm_;       // row i of the factor is row perm_[i] of A
};

// MatrixMarket "coordinate real general" dump.
void write_matrix_market(std::ostream& out, const SparseMatrix& a);

}  // namespace cfo

#endif  // CFO_SPARSE_HPP_
