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

#include "cfo/assembly.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <string>

#include "cfo/error.hpp"
#include "cfo/quadrature.hpp"

namespace cfo {

namespace {

constexpr double kSpdTolerance = 1e-12;

Vec2 perp(const Vec2& d) { return {-d.y, d.x}; }

std::string format_defect(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.3e", v);
  return buf;
}

void check_spd(const Mat2& a, const FieldPoint& p) {
  const auto [lo, hi] = symmetric_eigenvalues(a);
  const double asym = std::abs(a.xy - a.yx);
  if (!(lo > kSpdTolerance * std::max(1.0, std::abs(hi))) ||
      asym > kSpdTolerance * std::max(1.0, std::abs(hi))) {
    throw AssemblyError("diffusion tensor is not symmetric positive definite "
                        "at (" + std::to_string(p.x.x) + ", " +
                        std::to_string(p.x.y) + ") in element " +
                        std::to_string(p.element));
  }
}

// Visits every assembly quadrature point on the boundary of `t`:
// fn(local_edge, point, weight_times_length, phi) where phi are the three
// hat-function values at the point.
template <typename Fn>
void for_each_edge_point(const Mesh& mesh, const QuadRule& rule, int t,
                         Fn&& fn) {
  const auto& tri = mesh.triangle(t);
  for (int k = 0; k < 3; ++k) {
    const int e = mesh.element_edges(t)[k].edge;
    const Vec2& pa = mesh.node(tri[k]);
    const Vec2& pb = mesh.node(tri[(k + 1) % 3]);
    const double len = mesh.edge_length(e);
    for (std::size_t m = 0; m < rule.size(); ++m) {
      const double s = rule.points[m].x;
      std::array<double, 3> phi{};
      phi[k] = 1.0 - s;
      phi[(k + 1) % 3] = s;
      fn(k, pa + s * (pb - pa), rule.weights[m] * len, phi);
    }
  }
}

}  // namespace

std::array<Vec2, 3> p1_gradients(const Mesh& mesh, int element) {
  const auto& tri = mesh.triangle(element);
  const double inv = 1.0 / (2.0 * mesh.area(element));
  std::array<Vec2, 3> g;
  for (int i = 0; i < 3; ++i) {
    const Vec2 d = mesh.node(tri[(i + 2) % 3]) - mesh.node(tri[(i + 1) % 3]);
    g[i] = inv * perp(d);
  }
  return g;
}

Vec2 p1_gradient(const Mesh& mesh, std::span<const double> u, int element) {
  const auto g = p1_gradients(mesh, element);
  const auto& tri = mesh.triangle(element);
  return u[tri[0]] * g[0] + u[tri[1]] * g[1] + u[tri[2]] * g[2];
}

double weak_divergence(const Mesh& mesh, std::span<const double> q,
                       int element) {
  double acc = 0.0;
  for (const auto& ee : mesh.element_edges(element)) {
    acc += mesh.edge_length(ee.edge) * ee.sign * q[ee.edge];
  }
  return acc / mesh.area(element);
}

double j2_functional(const Mesh& mesh, const ProblemSpec& spec,
                     std::span<const double> v, std::span<const double> p) {
  const QuadRule rule = segment_rule(quad_defaults::kAssemblyEdgePoints);
  double total = 0.0;
  for (int t = 0; t < mesh.num_elements(); ++t) {
    const auto& tri = mesh.triangle(t);
    const Vec2 grad = p1_gradient(mesh, v, t);
    const Vec2 centroid = mesh.centroid(t);
    double local = 0.0;
    for_each_edge_point(mesh, rule, t, [&](int k, const Vec2& x, double w,
                                           const std::array<double, 3>& phi) {
      const int e = mesh.element_edges(t)[k].edge;
      const Vec2& ne = mesh.edge_normal(e);
      const FieldPoint fp{x, t, centroid};
      const double vx = phi[0] * v[tri[0]] + phi[1] * v[tri[1]] +
                        phi[2] * v[tri[2]];
      const double r = p[e] + dot(spec.alpha(fp) * grad, ne) +
                       vx * dot(spec.beta_at(fp), ne);
      local += w * r * r;
    });
    total += spec.weight(t) * mesh.diameter(t) * local;
  }
  return total;
}

std::vector<double> source_integrals(const Mesh& mesh,
                                     const ProblemSpec& spec) {
  const QuadRule rule = triangle_rule(quad_defaults::kSourceTriangleDegree);
  std::vector<double> out(mesh.num_elements(), 0.0);
  for (int t = 0; t < mesh.num_elements(); ++t) {
    const auto& tri = mesh.triangle(t);
    const Vec2& p0 = mesh.node(tri[0]);
    const Vec2 d1 = mesh.node(tri[1]) - p0;
    const Vec2 d2 = mesh.node(tri[2]) - p0;
    const double jac = 2.0 * mesh.area(t);
    const Vec2 centroid = mesh.centroid(t);
    double acc = 0.0;
    for (std::size_t m = 0; m < rule.size(); ++m) {
      const Vec2 x = p0 + rule.points[m].x * d1 + rule.points[m].y * d2;
      acc += rule.weights[m] * spec.source(FieldPoint{x, t, centroid});
    }
    out[t] = jac * acc;
  }
  return out;
}

CfoSystem assemble_system(const Mesh& mesh, const ProblemSpec& spec) {
  if (!spec.alpha || !spec.source) {
    throw AssemblyError("problem '" + spec.name +
                        "' is missing alpha or source");
  }
  CfoSystem sys;
  sys.marking = mark_boundary(mesh, spec.dirichlet, spec.neumann_zero);

  DofMap& dofs = sys.dofs;
  dofs.node_dof.assign(mesh.num_nodes(), -1);
  dofs.edge_dof.assign(mesh.num_edges(), -1);
  sys.lifted_u.assign(mesh.num_nodes(), 0.0);
  for (int v = 0; v < mesh.num_nodes(); ++v) {
    if (sys.marking.node[v] == BoundaryTag::kDirichlet) {
      if (!spec.dirichlet_g) {
        throw AssemblyError("problem '" + spec.name +
                            "' has Dirichlet edges but no boundary data");
      }
      sys.lifted_u[v] = spec.dirichlet_g(mesh.node(v));
    } else {
      dofs.node_dof[v] = dofs.num_free_nodes++;
    }
  }
  for (int e = 0; e < mesh.num_edges(); ++e) {
    if (sys.marking.edge[e] != BoundaryTag::kNeumann) {
      dofs.edge_dof[e] = dofs.num_free_nodes + dofs.num_free_edges++;
    }
  }
  dofs.num_elements = mesh.num_elements();
  const int lambda0 = dofs.lambda_offset();
  const int n = dofs.size();

  sys.source_integrals = source_integrals(mesh, spec);
  sys.rhs.assign(n, 0.0);

  const QuadRule rule = segment_rule(quad_defaults::kAssemblyEdgePoints);
  std::vector<Triplet> triplets;
  triplets.reserve(static_cast<std::size_t>(mesh.num_elements()) * 42);

  for (int t = 0; t < mesh.num_elements(); ++t) {
    const auto& tri = mesh.triangle(t);
    const auto& edges = mesh.element_edges(t);
    const auto grads = p1_gradients(mesh, t);
    const Vec2 centroid = mesh.centroid(t);
    const double scale = spec.weight(t) * mesh.diameter(t);

    // Local unknowns: three nodal values then the three edge fluxes.
    std::array<std::array<double, 6>, 6> local{};
    for_each_edge_point(mesh, rule, t, [&](int k, const Vec2& x, double w,
                                           const std::array<double, 3>& phi) {
      const Vec2& ne = mesh.edge_normal(edges[k].edge);
      const FieldPoint fp{x, t, centroid};
      const Mat2 a = spec.alpha(fp);
      check_spd(a, fp);
      const double bn = dot(spec.beta_at(fp), ne);
      std::array<double, 6> c{};
      for (int i = 0; i < 3; ++i) c[i] = dot(a * grads[i], ne) + bn * phi[i];
      c[3 + k] = 1.0;
      const double wk = scale * w;
      for (int i = 0; i < 6; ++i) {
        for (int j = 0; j < 6; ++j) local[i][j] += wk * (c[i] * c[j]);
      }
    });

    std::array<int, 6> dof{};
    std::array<double, 6> fixed{};
    for (int i = 0; i < 3; ++i) {
      dof[i] = dofs.node_dof[tri[i]];
      fixed[i] = sys.lifted_u[tri[i]];
      dof[3 + i] = dofs.edge_dof[edges[i].edge];
    }
    for (int i = 0; i < 6; ++i) {
      if (dof[i] < 0) continue;
      for (int j = 0; j < 6; ++j) {
        if (dof[j] >= 0) {
          triplets.push_back({dof[i], dof[j], local[i][j]});
        } else if (j < 3) {
          sys.rhs[dof[i]] -= local[i][j] * fixed[j];
        }
      }
    }

    const int row = lambda0 + t;
    for (int k = 0; k < 3; ++k) {
      const int qd = dof[3 + k];
      if (qd < 0) continue;
      const double b = mesh.edge_length(edges[k].edge) * edges[k].sign;
      triplets.push_back({row, qd, b});
      triplets.push_back({qd, row, b});
    }
    sys.rhs[row] = sys.source_integrals[t];
  }

  sys.matrix = SparseMatrix::from_triplets(n, triplets);
  return sys;
}

CfoSolution solve_cfo(const Mesh& mesh, const ProblemSpec& spec) {
  SymmetricIndefiniteSolver solver;
  return solve_cfo(mesh, spec, solver);
}

CfoSolution solve_cfo(const Mesh& mesh, const ProblemSpec& spec,
                      SymmetricIndefiniteSolver& solver) {
  CfoSystem sys = assemble_system(mesh, spec);
  solver.factorize(sys.matrix);
  const std::vector<double> x = solver.solve(sys.rhs);

  CfoSolution sol;
  sol.u = sys.lifted_u;
  for (int v = 0; v < mesh.num_nodes(); ++v) {
    if (sys.dofs.node_dof[v] >= 0) sol.u[v] = x[sys.dofs.node_dof[v]];
  }
  sol.q.assign(mesh.num_edges(), 0.0);
  for (int e = 0; e < mesh.num_edges(); ++e) {
    if (sys.dofs.edge_dof[e] >= 0) sol.q[e] = x[sys.dofs.edge_dof[e]];
  }
  const int lambda0 = sys.dofs.lambda_offset();
  sol.lambda.assign(x.begin() + lambda0, x.end());
  sol.dofs = std::move(sys.dofs);
  sol.source_integrals = std::move(sys.source_integrals);

  const auto defects = conservation_defects(mesh, sol.q, sol.source_integrals);
  const double tol = conservation_tolerance(sol.source_integrals);
  for (int t = 0; t < mesh.num_elements(); ++t) {
    if (!(std::abs(defects[t]) <= tol)) {
      throw SolverError("local conservation violated on element " +
                        std::to_string(t) + " by " +
                        format_defect(defects[t]));
    }
  }
  return sol;
}

std::vector<double> conservation_defects(
    const Mesh& mesh, std::span<const double> q,
    std::span<const double> source_integrals) {
  std::vector<double> out(mesh.num_elements());
  for (int t = 0; t < mesh.num_elements(); ++t) {
    double acc = 0.0;
    for (const auto& ee : mesh.element_edges(t)) {
      acc += mesh.edge_length(ee.edge) * ee.sign * q[ee.edge];
    }
    out[t] = acc - source_integrals[t];
  }
  return out;
}

double conservation_tolerance(std::span<const double> source_integrals) {
  double m = 0.0;
  for (double f : source_integrals) m = std::max(m, std::abs(f));
  return 1e-9 * (1.0 + m);
}

std::vector<std::array<double, 3>> naive_flux(const Mesh& mesh,
                                              const ProblemSpec& spec,
                                              std::span<const double> u) {
  const QuadRule rule = segment_rule(quad_defaults::kAssemblyEdgePoints);
  std::vector<std::array<double, 3>> out(mesh.num_elements());
  for (int t = 0; t < mesh.num_elements(); ++t) {
    const auto& tri = mesh.triangle(t);
    const Vec2 grad = p1_gradient(mesh, u, t);
    const Vec2 centroid = mesh.centroid(t);
    std::array<double, 3> acc{};
    for_each_edge_point(mesh, rule, t, [&](int k, const Vec2& x, double w,
                                           const std::array<double, 3>& phi) {
      const Vec2& ne = mesh.edge_normal(mesh.element_edges(t)[k].edge);
      const FieldPoint fp{x, t, centroid};
      const double ux = phi[0] * u[tri[0]] + phi[1] * u[tri[1]] +
                        phi[2] * u[tri[2]];
      acc[k] -= w * dot(spec.alpha(fp) * grad + ux * spec.beta_at(fp), ne);
    });
    for (int k = 0; k < 3; ++k) {
      acc[k] /= mesh.edge_length(mesh.element_edges(t)[k].edge);
    }
    out[t] = acc;
  }
  return out;
}

std::vector<double> averaged_edge_flux(
    const Mesh& mesh, std::span<const std::array<double, 3>> naive) {
  std::vector<double> sum(mesh.num_edges(), 0.0);
  std::vector<int> count(mesh.num_edges(), 0);
  for (int t = 0; t < mesh.num_elements(); ++t) {
    for (int k = 0; k < 3; ++k) {
      const int e = mesh.element_edges(t)[k].edge;
      sum[e] += naive[t][k];
      ++count[e];
    }
  }
  for (int e = 0; e < mesh.num_edges(); ++e) sum[e] /= count[e];
  return sum;
}

}  // namespace cfo
