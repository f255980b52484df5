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

#include <algorithm>
#include <cmath>
#include <string>
#include <utility>

#include "cfo/error.hpp"
#include "cfo/sparse.hpp"

namespace cfo {

namespace {

// Bunch-Kaufman growth-control constant (1 + sqrt(17)) / 8.
const double kBkAlpha = (1.0 + std::sqrt(17.0)) / 8.0;

}  // namespace

DenseLdlt::DenseLdlt(std::vector<double> a, int n)
    : n_(n),
      lower_(static_cast<std::size_t>(n) * n, 0.0),
      diag_(n, 0.0),
      offdiag_(n, 0.0),
      block_size_(n, 0),
      perm_(n) {
  if (a.size() != static_cast<std::size_t>(n) * n) {
    throw std::invalid_argument("dense matrix size does not match dimension");
  }
  for (int i = 0; i < n; ++i) perm_[i] = i;
  auto s = [&](int i, int j) -> double& { return a[std::size_t(i) * n + j]; };
  auto l = [&](int i, int j) -> double& { return lower_[std::size_t(i) * n + j]; };

  double scale = 0.0;
  for (double v : a) scale = std::max(scale, std::abs(v));
  const double tol = kPivotTolerance * scale;

  const auto swap_sym = [&](int k, int i, int j) {
    if (i == j) return;
    for (int c = k; c < n; ++c) std::swap(s(i, c), s(j, c));
    for (int r = k; r < n; ++r) std::swap(s(r, i), s(r, j));
    for (int c = 0; c < k; ++c) std::swap(l(i, c), l(j, c));
    std::swap(perm_[i], perm_[j]);
  };

  int k = 0;
  while (k < n) {
    const double akk = std::abs(s(k, k));
    double lambda = 0.0;
    int r = k;
    for (int i = k + 1; i < n; ++i) {
      if (std::abs(s(i, k)) > lambda) {
        lambda = std::abs(s(i, k));
        r = i;
      }
    }
    if (std::max(akk, lambda) <= tol) {
      throw SolverError("matrix is singular to working precision at pivot " +
                        std::to_string(k));
    }

    int size = 1;
    if (akk < kBkAlpha * lambda) {
      double sigma = 0.0;
      for (int j = k; j < n; ++j) {
        if (j != r) sigma = std::max(sigma, std::abs(s(r, j)));
      }
      if (akk * sigma >= kBkAlpha * lambda * lambda) {
        // 1x1 pivot at k.
      } else if (std::abs(s(r, r)) >= kBkAlpha * sigma) {
        swap_sym(k, k, r);
      } else {
        swap_sym(k, k + 1, r);
        size = 2;
      }
    }

    l(k, k) = 1.0;
    block_size_[k] = size;
    if (size == 1) {
      const double d = s(k, k);
      if (std::abs(d) <= tol) {
        throw SolverError("pivot " + std::to_string(k) + " below tolerance");
      }
      diag_[k] = d;
      for (int i = k + 1; i < n; ++i) l(i, k) = s(i, k) / d;
      for (int i = k + 1; i < n; ++i) {
        const double li = l(i, k);
        if (li == 0.0) continue;
        for (int j = k + 1; j < n; ++j) s(i, j) -= li * s(k, j);
      }
      k += 1;
    } else {
      const double d11 = s(k, k);
      const double d21 = s(k + 1, k);
      const double d22 = s(k + 1, k + 1);
      const double det = d11 * d22 - d21 * d21;
      if (std::abs(det) <= tol * scale) {
        throw SolverError("2x2 pivot at " + std::to_string(k) +
                          " below tolerance");
      }
      diag_[k] = d11;
      diag_[k + 1] = d22;
      offdiag_[k] = d21;
      l(k + 1, k + 1) = 1.0;
      for (int i = k + 2; i < n; ++i) {
        const double a1 = s(i, k);
        const double a2 = s(i, k + 1);
        l(i, k) = (d22 * a1 - d21 * a2) / det;
        l(i, k + 1) = (d11 * a2 - d21 * a1) / det;
      }
      for (int i = k + 2; i < n; ++i) {
        const double l1 = l(i, k);
        const double l2 = l(i, k + 1);
        for (int j = k + 2; j < n; ++j) {
          s(i, j) -= l1 * s(j, k) + l2 * s(j, k + 1);
        }
      }
      k += 2;
    }
  }
}

std::vector<double> DenseLdlt::solve(std::span<const double> b) const {
  const int n = n_;
  if (b.size() != static_cast<std::size_t>(n)) {
    throw std::invalid_argument("right-hand side size does not match");
  }
  auto l = [&](int i, int j) { return lower_[std::size_t(i) * n + j]; };
  std::vector<double> y(n);
  for (int i = 0; i < n; ++i) y[i] = b[perm_[i]];
  for (int i = 0; i < n; ++i) {
    double acc = y[i];
    for (int j = 0; j < i; ++j) acc -= l(i, j) * y[j];
    y[i] = acc;
  }
  for (int k = 0; k < n;) {
    if (block_size_[k] == 1) {
      y[k] /= diag_[k];
      k += 1;
    } else {
      const double d11 = diag_[k];
      const double d21 = offdiag_[k];
      const double d22 = diag_[k + 1];
      const double det = d11 * d22 - d21 * d21;
      const double y1 = y[k];
      const double y2 = y[k + 1];
      y[k] = (d22 * y1 - d21 * y2) / det;
      y[k + 1] = (d11 * y2 - d21 * y1) / det;
      k += 2;
    }
  }
  for (int i = n - 1; i >= 0; --i) {
    double acc = y[i];
    for (int j = i + 1; j < n; ++j) acc -= l(j, i) * y[j];
    y[i] = acc;
  }
  std::vector<double> x(n);
  for (int i = 0; i < n; ++i) x[perm_[i]] = y[i];
  return x;
}

}  // namespace cfo
