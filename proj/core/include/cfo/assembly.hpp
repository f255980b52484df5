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

#ifndef CFO_ASSEMBLY_HPP_
#define CFO_ASSEMBLY_HPP_

#include <array>
#include <span>
#include <vector>

#include "cfo/mesh.hpp"
#include "cfo/problem.hpp"
#include "cfo/sparse.hpp"

namespace cfo {

// Unknown ordering of the saddle-point system: [u at free nodes | q at free
// edges | lambda on every element]. Fixed nodes (Dirichlet) and pinned edges
// (zero-flux Neumann) map to -1.
struct DofMap {
  std::vector<int> node_dof;
  std::vector<int> edge_dof;
  int num_free_nodes = 0;
  int num_free_edges = 0;
  int num_elements = 0;

  int edge_offset() const { return num_free_nodes; }
  int lambda_offset() const { return num_free_nodes + num_free_edges; }
  int size() const { return lambda_offset() + num_elements; }
};

struct CfoSystem {
  SparseMatrix matrix;
  std::vector<double> rhs;
  DofMap dofs;
  BoundaryMarking marking;
  // Nodal Dirichlet values (0 at free nodes).
  std::vector<double> lifted_u;
  // Integral of f over each element.
  std::vector<double> source_integrals;
};

struct CfoSolution {
  std::vector<double> u;       // per node, Dirichlet values included
  std::vector<double> q;       // per edge, along n_e
  std::vector<double> lambda;  // per element
  DofMap dofs;
  std::vector<double> source_integrals;
};

// Gradients of the three P1 hat functions of a triangle.
std::array<Vec2, 3> p1_gradients(const Mesh& mesh, int element);

// Gradient of the P1 interpolant with nodal values u on one element.
Vec2 p1_gradient(const Mesh& mesh, std::span<const double> u, int element);

// (1/|T|) sum_e |e| s(T,e) q_e, exact for edgewise-constant q.
double weak_divergence(const Mesh& mesh, std::span<const double> q, int element);

// Flux functional sum_T sum_{e in dT} tau_T h_T int_e (p + alpha grad v . n_e
// + beta v . n_e)^2 ds, evaluated with the assembly edge rule. There is no
// 1/2 in front.
double j2_functional(const Mesh& mesh, const ProblemSpec& spec,
                     std::span<const double> v, std::span<const double> p);

// Integral of f over each element (degree-4 triangle rule).
std::vector<double> source_integrals(const Mesh& mesh, const ProblemSpec& spec);

// Builds the symmetric KKT system. Dirichlet values are lifted into the
// right-hand side; Neumann-zero edge fluxes are removed. Throws AssemblyError
// on a non-SPD alpha sample or an unclassified boundary edge.
CfoSystem assemble_system(const Mesh& mesh, const ProblemSpec& spec);

CfoSolution solve_cfo(const Mesh& mesh, const ProblemSpec& spec);
// Reuses the solver's cached symbolic analysis across repeated solves.
CfoSolution solve_cfo(const Mesh& mesh, const ProblemSpec& spec,
                      SymmetricIndefiniteSolver& solver);

// Per element defect sum_e |e| s(T,e) q_e - int_T f.
std::vector<double> conservation_defects(const Mesh& mesh,
                                         std::span<const double> q,
                                         std::span<const double> source_integrals);

// Tolerance for local mass conservation: 1e-9 (1 + max_T |int_T f|).
double conservation_tolerance(std::span<const double> source_integrals);

// Mean over each (element, local edge) of -(alpha grad u + beta u) . n_e,
// with coefficients and u taken from that element.
std::vector<std::array<double, 3>> naive_flux(const Mesh& mesh,
                                              const ProblemSpec& spec,
                                              std::span<const double> u);

// Edge flux averaging the one-sided naive fluxes of the adjacent elements.
std::vector<double> averaged_edge_flux(
    const Mesh& mesh, std::span<const std::array<double, 3>> naive);

}  // namespace cfo

#endif  // CFO_ASSEMBLY_HPP_
