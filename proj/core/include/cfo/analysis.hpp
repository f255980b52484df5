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

#ifndef CFO_ANALYSIS_HPP_
#define CFO_ANALYSIS_HPP_

#include <array>
#include <cstdint>
#include <iosfwd>
#include <optional>
#include <span>
#include <vector>

#include "cfo/assembly.hpp"
#include "cfo/mesh.hpp"
#include "cfo/problem.hpp"

namespace cfo {

// ||u_h - u||_0 with the degree-5 triangle rule. Throws Error if the problem
// has no exact solution.
double error_l2(const Mesh& mesh, std::span<const double> u_h,
                const ProblemSpec& spec);

// ||grad(u_h - u)||_0.
double error_h1(const Mesh& mesh, std::span<const double> u_h,
                const ProblemSpec& spec);

// |||q - q_h|||_0 = (sum_T sum_{e in dT} h_e int_e (q - q_h)^2)^(1/2), with
// the exact flux q = -(alpha grad u + beta u) . n_e taken from each element
// in turn, so interior edges count once per side.
double flux_error(const Mesh& mesh, std::span<const double> q_h,
                  const ProblemSpec& spec);

// (sum_T |T| lambda_T^2)^(1/2).
double lambda_norm(const Mesh& mesh, std::span<const double> lambda);

// Jump of a piecewise constant across each edge,
// sum over adjacent T of s(T,e) sigma_T. On a boundary edge that is the
// one-sided trace with the sign of its element.
std::vector<double> edge_jumps(const Mesh& mesh, std::span<const double> sigma);

// ||sigma||_{1,h} = (sum_e [[sigma]]_e^2)^(1/2).
double discrete_h1_norm(const Mesh& mesh, std::span<const double> sigma);

// p_sigma = [[sigma]]_e / h_e.
std::vector<double> build_inf_sup_flux(const Mesh& mesh,
                                       std::span<const double> sigma);

// ||p||_0 = (sum_e h_e int_e p^2)^(1/2) for edgewise-constant p.
double edge_flux_norm(const Mesh& mesh, std::span<const double> p);

// (div_w p, sigma) = sum_T |T| (div_w p)_T sigma_T.
double weak_divergence_pairing(const Mesh& mesh, std::span<const double> p,
                               std::span<const double> sigma);

struct ErrorReport {
  double h = 0.0;
  double l2 = 0.0;
  double h1 = 0.0;
  double residual = 0.0;  // J_2(u_h, q_h)^(1/2)
  double flux = 0.0;
  double lambda = 0.0;
  // Norms of the exact solution on the same mesh and quadrature.
  double u_l2 = 0.0;
  double u_h1 = 0.0;
  double q_norm = 0.0;

  double relative_l2() const { return l2 / u_l2; }
  double relative_h1() const { return h1 / u_h1; }
  double relative_flux() const { return flux / q_norm; }
};

ErrorReport error_report(const Mesh& mesh, const ProblemSpec& spec,
                         const CfoSolution& sol);

struct MeshFamily {
  enum class Kind { kUniform, kPerturbed };
  Kind kind = Kind::kUniform;
  double magnitude = 0.0;
  std::uint64_t seed = 0;

  Mesh build(const Rectangle& domain, int n) const;
};

enum class Metric { kL2, kH1, kResidual, kFlux, kLambda };
inline constexpr std::array<Metric, 5> kAllMetrics{
    Metric::kL2, Metric::kH1, Metric::kResidual, Metric::kFlux,
    Metric::kLambda};

struct ConvergenceRow {
  int n = 0;
  ErrorReport report;
  double max_conservation_defect = 0.0;
  double conservation_tolerance = 0.0;
};

// Errors below this are treated as rounding noise; no order is reported for
// a pair involving them.
inline constexpr double kRoundingFloor = 1e-12;

class ConvergenceTable {
 public:
  ConvergenceTable(std::vector<ConvergenceRow> rows, bool relative);

  const std::vector<ConvergenceRow>& rows() const { return rows_; }
  bool relative() const { return relative_; }

  // Metric value of a row; L2, H1 and flux divide by the exact norm when the
  // table is relative. Residual and lambda are always absolute.
  double value(std::size_t row, Metric m) const;
  // log2(e(h) / e(h/2)) against the previous row; empty on the first row or
  // when either value is at rounding level.
  std::optional<double> order(std::size_t row, Metric m) const;

 private:
  std::vector<ConvergenceRow> rows_;
  bool relative_;
};

// Solves every level (subdivision counts, strictly doubling) and tabulates
// errors and observed orders. Throws ConfigError for a bad level list.
ConvergenceTable convergence_study(const ProblemSpec& spec,
                                   const MeshFamily& family,
                                   std::span<const int> levels,
                                   bool relative = false);

// CSV with header
// h,l2,l2_order,h1,h1_order,residual,residual_order,flux,flux_order,lambda,lambda_order
// and 17 significant digits; order cells are empty when undefined.
void write_convergence_csv(std::ostream& out, const ConvergenceTable& table);

// Human-readable table with 3 significant digits and 2-digit orders.
void print_convergence_table(std::ostream& out, const ConvergenceTable& table);

}  // namespace cfo

#endif  // CFO_ANALYSIS_HPP_
