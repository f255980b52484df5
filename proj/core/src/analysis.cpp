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

#include "cfo/analysis.hpp"

#include <cmath>
#include <cstdio>
#include <ostream>
#include <string>

#include "cfo/error.hpp"
#include "cfo/quadrature.hpp"

namespace cfo {

namespace {

void require_exact(const ProblemSpec& spec) {
  if (!spec.exact) {
    throw Error("problem '" + spec.name + "' has no exact solution");
  }
}

// Visits the degree-5 quadrature points of element t:
// fn(point, weight_times_jacobian, hat values).
template <typename Fn>
void for_each_area_point(const Mesh& mesh, const QuadRule& rule, int t,
                         Fn&& fn) {
  const auto& tri = mesh.triangle(t);
  const Vec2& p0 = mesh.node(tri[0]);
  const Vec2 d1 = mesh.node(tri[1]) - p0;
  const Vec2 d2 = mesh.node(tri[2]) - p0;
  const double jac = 2.0 * mesh.area(t);
  for (std::size_t m = 0; m < rule.size(); ++m) {
    const double xi = rule.points[m].x;
    const double eta = rule.points[m].y;
    fn(p0 + xi * d1 + eta * d2, jac * rule.weights[m],
       std::array<double, 3>{1.0 - xi - eta, xi, eta});
  }
}

}  // namespace

double error_l2(const Mesh& mesh, std::span<const double> u_h,
                const ProblemSpec& spec) {
  require_exact(spec);
  const QuadRule rule = triangle_rule(quad_defaults::kErrorTriangleDegree);
  double acc = 0.0;
  for (int t = 0; t < mesh.num_elements(); ++t) {
    const auto& tri = mesh.triangle(t);
    const Vec2 c = mesh.centroid(t);
    for_each_area_point(mesh, rule, t, [&](const Vec2& x, double w,
                                           const std::array<double, 3>& phi) {
      const double uh = phi[0] * u_h[tri[0]] + phi[1] * u_h[tri[1]] +
                        phi[2] * u_h[tri[2]];
      const double d = uh - spec.exact->u(FieldPoint{x, t, c});
      acc += w * d * d;
    });
  }
  return std::sqrt(acc);
}

double error_h1(const Mesh& mesh, std::span<const double> u_h,
                const ProblemSpec& spec) {
  require_exact(spec);
  const QuadRule rule = triangle_rule(quad_defaults::kErrorTriangleDegree);
  double acc = 0.0;
  for (int t = 0; t < mesh.num_elements(); ++t) {
    const Vec2 grad = p1_gradient(mesh, u_h, t);
    const Vec2 c = mesh.centroid(t);
    for_each_area_point(mesh, rule, t, [&](const Vec2& x, double w,
                                           const std::array<double, 3>&) {
      const Vec2 d = grad - spec.exact->gradient(FieldPoint{x, t, c});
      acc += w * dot(d, d);
    });
  }
  return std::sqrt(acc);
}

double flux_error(const Mesh& mesh, std::span<const double> q_h,
                  const ProblemSpec& spec) {
  require_exact(spec);
  const QuadRule rule = segment_rule(quad_defaults::kErrorEdgePoints);
  double acc = 0.0;
  for (int t = 0; t < mesh.num_elements(); ++t) {
    const auto& tri = mesh.triangle(t);
    const Vec2 c = mesh.centroid(t);
    for (int k = 0; k < 3; ++k) {
      const int e = mesh.element_edges(t)[k].edge;
      const Vec2& ne = mesh.edge_normal(e);
      const Vec2& pa = mesh.node(tri[k]);
      const Vec2& pb = mesh.node(tri[(k + 1) % 3]);
      const double he = mesh.edge_length(e);
      double local = 0.0;
      for (std::size_t m = 0; m < rule.size(); ++m) {
        const Vec2 x = pa + rule.points[m].x * (pb - pa);
        const double d = spec.exact_flux(FieldPoint{x, t, c}, ne) - q_h[e];
        local += rule.weights[m] * d * d;
      }
      acc += he * he * local;
    }
  }
  return std::sqrt(acc);
}

double lambda_norm(const Mesh& mesh, std::span<const double> lambda) {
  double acc = 0.0;
  for (int t = 0; t < mesh.num_elements(); ++t) {
    acc += mesh.area(t) * lambda[t] * lambda[t];
  }
  return std::sqrt(acc);
}

std::vector<double> edge_jumps(const Mesh& mesh,
                               std::span<const double> sigma) {
  std::vector<double> jump(mesh.num_edges(), 0.0);
  for (int e = 0; e < mesh.num_edges(); ++e) {
    const auto& adj = mesh.edge_elements(e);
    if (adj.left != kNoElement) jump[e] += sigma[adj.left];
    if (adj.right != kNoElement) jump[e] -= sigma[adj.right];
  }
  return jump;
}

double discrete_h1_norm(const Mesh& mesh, std::span<const double> sigma) {
  return norm2(edge_jumps(mesh, sigma));
}

std::vector<double> build_inf_sup_flux(const Mesh& mesh,
                                       std::span<const double> sigma) {
  std::vector<double> p = edge_jumps(mesh, sigma);
  for (int e = 0; e < mesh.num_edges(); ++e) p[e] /= mesh.edge_length(e);
  return p;
}

double edge_flux_norm(const Mesh& mesh, std::span<const double> p) {
  double acc = 0.0;
  for (int e = 0; e < mesh.num_edges(); ++e) {
    const double he = mesh.edge_length(e);
    acc += he * he * p[e] * p[e];
  }
  return std::sqrt(acc);
}

double weak_divergence_pairing(const Mesh& mesh, std::span<const double> p,
                               std::span<const double> sigma) {
  double acc = 0.0;
  for (int t = 0; t < mesh.num_elements(); ++t) {
    acc += mesh.area(t) * weak_divergence(mesh, p, t) * sigma[t];
  }
  return acc;
}

ErrorReport error_report(const Mesh& mesh, const ProblemSpec& spec,
                         const CfoSolution& sol) {
  require_exact(spec);
  const std::vector<double> zero_nodes(mesh.num_nodes(), 0.0);
  const std::vector<double> zero_edges(mesh.num_edges(), 0.0);
  ErrorReport r;
  r.h = mesh.nominal_h();
  r.l2 = error_l2(mesh, sol.u, spec);
  r.h1 = error_h1(mesh, sol.u, spec);
  r.residual = std::sqrt(j2_functional(mesh, spec, sol.u, sol.q));
  r.flux = flux_error(mesh, sol.q, spec);
  r.lambda = lambda_norm(mesh, sol.lambda);
  r.u_l2 = error_l2(mesh, zero_nodes, spec);
  r.u_h1 = error_h1(mesh, zero_nodes, spec);
  r.q_norm = flux_error(mesh, zero_edges, spec);
  return r;
}

Mesh MeshFamily::build(const Rectangle& domain, int n) const {
  if (kind == Kind::kPerturbed) {
    return build_perturbed(domain, n, magnitude, seed);
  }
  return build_uniform(domain, n);
}

ConvergenceTable::ConvergenceTable(std::vector<ConvergenceRow> rows,
                                   bool relative)
    : rows_(std::move(rows)), relative_(relative) {}

double ConvergenceTable::value(std::size_t row, Metric m) const {
  const ErrorReport& r = rows_.at(row).report;
  switch (m) {
    case Metric::kL2:
      return relative_ ? r.relative_l2() : r.l2;
    case Metric::kH1:
      return relative_ ? r.relative_h1() : r.h1;
    case Metric::kResidual:
      return r.residual;
    case Metric::kFlux:
      return relative_ ? r.relative_flux() : r.flux;
    case Metric::kLambda:
      return r.lambda;
  }
  return 0.0;
}

std::optional<double> ConvergenceTable::order(std::size_t row, Metric m) const {
  if (row == 0 || row >= rows_.size()) return std::nullopt;
  const double coarse = value(row - 1, m);
  const double fine = value(row, m);
  if (!(coarse > kRoundingFloor) || !(fine > kRoundingFloor)) {
    return std::nullopt;
  }
  return std::log2(coarse / fine);
}

ConvergenceTable convergence_study(const ProblemSpec& spec,
                                   const MeshFamily& family,
                                   std::span<const int> levels,
                                   bool relative) {
  if (levels.empty()) throw ConfigError("convergence study needs levels");
  for (std::size_t i = 0; i < levels.size(); ++i) {
    if (levels[i] < 1) throw ConfigError("mesh levels must be positive");
    if (i > 0 && levels[i] != 2 * levels[i - 1]) {
      throw ConfigError("mesh levels must double: " +
                        std::to_string(levels[i - 1]) + " then " +
                        std::to_string(levels[i]));
    }
  }
  std::vector<ConvergenceRow> rows;
  rows.reserve(levels.size());
  for (int n : levels) {
    const Mesh mesh = family.build(spec.domain, n);
    const CfoSolution sol = solve_cfo(mesh, spec);
    ConvergenceRow row;
    row.n = n;
    row.report = error_report(mesh, spec, sol);
    double worst = 0.0;
    for (double d : conservation_defects(mesh, sol.q, sol.source_integrals)) {
      worst = std::max(worst, std::abs(d));
    }
    row.max_conservation_defect = worst;
    row.conservation_tolerance = conservation_tolerance(sol.source_integrals);
    rows.push_back(row);
  }
  return ConvergenceTable(std::move(rows), relative);
}

namespace {

std::string format_number(double v, int digits) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*g", digits, v);
  return buf;
}

}  // namespace

void write_convergence_csv(std::ostream& out, const ConvergenceTable& table) {
  out << "h,l2,l2_order,h1,h1_order,residual,residual_order,flux,flux_order,"
         "lambda,lambda_order\n";
  for (std::size_t i = 0; i < table.rows().size(); ++i) {
    out << format_number(table.rows()[i].report.h, 17);
    for (Metric m : kAllMetrics) {
      out << ',' << format_number(table.value(i, m), 17) << ',';
      if (const auto o = table.order(i, m)) out << format_number(*o, 17);
    }
    out << '\n';
  }
}

void print_convergence_table(std::ostream& out, const ConvergenceTable& table) {
  static constexpr const char* kHeads[] = {"L2", "H1", "J2^1/2", "flux",
                                           "lambda"};
  char buf[128];
  std::snprintf(buf, sizeof buf, "%-10s", "h");
  out << buf;
  for (const char* head : kHeads) {
    std::snprintf(buf, sizeof buf, " | %-10s %5s", head, "order");
    out << buf;
  }
  out << (table.relative() ? "   (L2, H1, flux relative)\n" : "\n");
  for (std::size_t i = 0; i < table.rows().size(); ++i) {
    const double h = table.rows()[i].report.h;
    std::snprintf(buf, sizeof buf, "1/%-8s",
                  format_number(1.0 / h, 6).c_str());
    out << buf;
    for (Metric m : kAllMetrics) {
      const auto o = table.order(i, m);
      std::snprintf(buf, sizeof buf, " | %-10s %5s",
                    format_number(table.value(i, m), 3).c_str(),
                    o ? format_number(*o, 2).c_str() : "");
      out << buf;
    }
    out << '\n';
  }
}

}  // namespace cfo
