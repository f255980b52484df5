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

#include <cmath>
#include <random>

#include <gtest/gtest.h>

#include "cfo/assembly.hpp"
#include "cfo/error.hpp"
#include "cfo/test_cases.hpp"

namespace cfo {
namespace {

const Rectangle kUnit{{0.0, 0.0}, {1.0, 1.0}};

Mesh reference_triangle() {
  return Mesh({{0.0, 0.0}, {1.0, 0.0}, {0.0, 1.0}}, {{0, 1, 2}});
}

ProblemSpec constant_alpha_problem(Mat2 alpha, BoundaryData g, double f = 0.0) {
  ProblemSpec spec;
  spec.name = "constant";
  spec.domain = kUnit;
  spec.alpha = [alpha](const FieldPoint&) { return alpha; };
  spec.source = [f](const FieldPoint&) { return f; };
  spec.dirichlet_g = std::move(g);
  spec.dirichlet = whole_boundary();
  return spec;
}

double max_abs(std::span<const double> v) {
  double m = 0.0;
  for (double x : v) m = std::max(m, std::abs(x));
  return m;
}

TEST(WeakDivergence, ConstantFieldHasZeroDivergence) {
  const Mesh m = build_perturbed(kUnit, 4, 0.2, 5);
  const Vec2 c{0.7, -1.3};
  std::vector<double> q(m.num_edges());
  for (int e = 0; e < m.num_edges(); ++e) q[e] = dot(c, m.edge_normal(e));
  for (int t = 0; t < m.num_elements(); ++t) {
    EXPECT_NEAR(weak_divergence(m, q, t), 0.0, 1e-13);
  }
  const std::vector<double> zero(m.num_edges(), 0.0);
  EXPECT_EQ(weak_divergence(m, zero, 0), 0.0);
}

TEST(WeakDivergence, LinearFieldHasUnitDivergence) {
  const Mesh m = build_perturbed(kUnit, 4, 0.2, 9);
  std::vector<double> q(m.num_edges());
  for (int e = 0; e < m.num_edges(); ++e) {
    q[e] = m.edge_midpoint(e).x * m.edge_normal(e).x;
  }
  for (int t = 0; t < m.num_elements(); ++t) {
    EXPECT_NEAR(weak_divergence(m, q, t), 1.0, 1e-12);
  }
}

TEST(J2Functional, ReferenceTriangleByHand) {
  const Mesh m = reference_triangle();
  const ProblemSpec spec = constant_alpha_problem(Mat2::identity(), nullptr);
  const std::vector<double> v{0.0, 1.0, 0.0};  // grad v = (1, 0)
  const std::vector<double> p(3, 0.0);
  // Bottom edge 0, left edge h_T * 1 * 1, hypotenuse h_T * (1/2) * sqrt(2).
  EXPECT_NEAR(j2_functional(m, spec, v, p), 1.0 + std::sqrt(2.0), 1e-14);
  const std::vector<double> zero(3, 0.0);
  EXPECT_EQ(j2_functional(m, spec, zero, p), 0.0);
}

TEST(J2Functional, ExactFluxOfLinearFunctionGivesZero) {
  const Mesh m = reference_triangle();
  const Mat2 alpha{2.0, 0.5, 0.5, 1.0};
  const ProblemSpec spec = constant_alpha_problem(alpha, nullptr);
  const std::vector<double> v{1.0, 3.0, 4.0};
  const Vec2 grad = p1_gradient(m, v, 0);
  EXPECT_NEAR(grad.x, 2.0, 1e-15);
  EXPECT_NEAR(grad.y, 3.0, 1e-15);
  std::vector<double> p(3);
  for (int e = 0; e < 3; ++e) p[e] = -dot(alpha * grad, m.edge_normal(e));
  EXPECT_NEAR(j2_functional(m, spec, v, p), 0.0, 1e-24);
}

TEST(P1Gradients, SumToZero) {
  const Mesh m = build_perturbed(kUnit, 3, 0.25, 2);
  for (int t = 0; t < m.num_elements(); ++t) {
    const auto g = p1_gradients(m, t);
    const Vec2 s = g[0] + g[1] + g[2];
    EXPECT_NEAR(s.x, 0.0, 1e-12);
    EXPECT_NEAR(s.y, 0.0, 1e-12);
  }
}

TEST(AssembleSystem, DimensionAndSymmetry) {
  const ProblemSpec spec = test_case(1);
  const Mesh m = build_uniform(spec.domain, 2);
  const CfoSystem sys = assemble_system(m, spec);
  EXPECT_EQ(sys.dofs.num_free_nodes, 1);
  EXPECT_EQ(sys.dofs.num_free_edges, 16);
  EXPECT_EQ(sys.dofs.num_elements, 8);
  EXPECT_EQ(sys.dofs.size(), 25);
  EXPECT_EQ(sys.matrix.dimension(), 25);
  EXPECT_EQ(sys.matrix.asymmetry(), 0.0);
}

TEST(AssembleSystem, SymmetricWithConvection) {
  const ProblemSpec spec = test_case(5);
  const Mesh m = build_perturbed(spec.domain, 6, 0.2, 4);
  EXPECT_EQ(assemble_system(m, spec).matrix.asymmetry(), 0.0);
}

TEST(AssembleSystem, RejectsIndefiniteAlpha) {
  ProblemSpec spec = constant_alpha_problem(Mat2::diagonal(1.0, -1.0),
                                            [](const Vec2&) { return 0.0; });
  EXPECT_THROW(assemble_system(build_uniform(kUnit, 2), spec), AssemblyError);
  spec.alpha = [](const FieldPoint&) { return Mat2{1.0, 2.0, 2.0, 1.0}; };
  EXPECT_THROW(assemble_system(build_uniform(kUnit, 2), spec), AssemblyError);
}

TEST(AssembleSystem, RejectsUnclassifiedBoundary) {
  ProblemSpec spec = constant_alpha_problem(Mat2::identity(),
                                            [](const Vec2&) { return 0.0; });
  spec.dirichlet = [](const Vec2& x) { return x.x < 1e-12; };
  EXPECT_THROW(assemble_system(build_uniform(kUnit, 2), spec), AssemblyError);
}

TEST(SolveCfo, HomogeneousDataGivesZero) {
  const ProblemSpec spec = constant_alpha_problem(
      Mat2{2.0, 0.3, 0.3, 1.0}, [](const Vec2&) { return 0.0; });
  const Mesh m = build_perturbed(kUnit, 8, 0.2, 1);
  const CfoSolution sol = solve_cfo(m, spec);
  EXPECT_LT(max_abs(sol.u), 1e-14);
  EXPECT_LT(max_abs(sol.q), 1e-14);
  EXPECT_LT(max_abs(sol.lambda), 1e-14);
}

TEST(SolveCfo, ConstantSolutionIsReproduced) {
  const ProblemSpec spec =
      constant_alpha_problem(Mat2::identity(), [](const Vec2&) { return 3.0; });
  const Mesh m = build_uniform(kUnit, 6);
  const CfoSolution sol = solve_cfo(m, spec);
  for (double u : sol.u) EXPECT_NEAR(u, 3.0, 1e-12);
  EXPECT_LT(max_abs(sol.q), 1e-12);
}

TEST(SolveCfo, LinearSolutionIsReproducedWithFullTensor) {
  const Mat2 alpha{2.0, 0.5, 0.5, 1.0};
  const auto exact = [](const Vec2& x) { return 1.0 + 2.0 * x.x + 3.0 * x.y; };
  const ProblemSpec spec = constant_alpha_problem(alpha, exact);
  const Mesh m = build_perturbed(kUnit, 8, 0.25, 3);
  const CfoSolution sol = solve_cfo(m, spec);
  for (int v = 0; v < m.num_nodes(); ++v) {
    EXPECT_NEAR(sol.u[v], exact(m.node(v)), 1e-11);
  }
  const Vec2 flux = -(alpha * Vec2{2.0, 3.0});
  for (int e = 0; e < m.num_edges(); ++e) {
    EXPECT_NEAR(sol.q[e], dot(flux, m.edge_normal(e)), 1e-11);
  }
  EXPECT_LT(max_abs(sol.lambda), 1e-10);
  EXPECT_LT(j2_functional(m, spec, sol.u, sol.q), 1e-20);
}

TEST(SolveCfo, DirichletNodesCarryBoundaryData) {
  const ProblemSpec spec = test_case(1);
  const Mesh m = build_uniform(spec.domain, 8);
  const CfoSolution sol = solve_cfo(m, spec);
  for (int v = 0; v < m.num_nodes(); ++v) {
    if (m.is_boundary_node(v)) EXPECT_EQ(sol.u[v], spec.dirichlet_g(m.node(v)));
  }
}

class ConservationTest : public ::testing::TestWithParam<int> {};

TEST_P(ConservationTest, LocalMassIsConserved) {
  const ProblemSpec spec = test_case(GetParam());
  for (const Mesh& m : {build_uniform(spec.domain, 8),
                        build_perturbed(spec.domain, 8, 0.2, 17)}) {
    const CfoSolution sol = solve_cfo(m, spec);
    const auto defects = conservation_defects(m, sol.q, sol.source_integrals);
    EXPECT_LE(max_abs(defects), conservation_tolerance(sol.source_integrals));
  }
}

INSTANTIATE_TEST_SUITE_P(AllCases, ConservationTest,
                         ::testing::Range(1, kNumTestCases + 1));

TEST(NaiveFlux, IsDiscontinuousAndNotConservative) {
  const ProblemSpec spec = test_case(1);
  const Mesh m = build_uniform(spec.domain, 8);
  const CfoSolution sol = solve_cfo(m, spec);
  const auto naive = naive_flux(m, spec, sol.u);

  double jump = 0.0;
  std::vector<double> left(m.num_edges(), 0.0), right(m.num_edges(), 0.0);
  for (int t = 0; t < m.num_elements(); ++t) {
    for (int k = 0; k < 3; ++k) {
      const ElementEdge& ee = m.element_edges(t)[k];
      (ee.sign > 0 ? left : right)[ee.edge] = naive[t][k];
    }
  }
  for (int e = 0; e < m.num_edges(); ++e) {
    if (!m.is_boundary_edge(e)) jump = std::max(jump, std::abs(left[e] - right[e]));
  }
  EXPECT_GT(jump, 1e-3);

  double worst = 0.0;
  for (int t = 0; t < m.num_elements(); ++t) {
    double net = 0.0;
    for (int k = 0; k < 3; ++k) {
      const ElementEdge& ee = m.element_edges(t)[k];
      net += m.edge_length(ee.edge) * ee.sign * naive[t][k];
    }
    worst = std::max(worst, std::abs(net - sol.source_integrals[t]));
  }
  EXPECT_GT(worst, 1e-3);
}

TEST(NaiveFlux, ZeroForConstantSolution) {
  const ProblemSpec spec =
      constant_alpha_problem(Mat2::identity(), [](const Vec2&) { return 2.0; });
  const Mesh m = build_uniform(kUnit, 4);
  const std::vector<double> u(m.num_nodes(), 2.0);
  for (const auto& f : naive_flux(m, spec, u)) {
    for (double v : f) EXPECT_EQ(v, 0.0);
  }
  for (double v : averaged_edge_flux(m, naive_flux(m, spec, u))) EXPECT_EQ(v, 0.0);
}

// Admissible directions: v vanishes at Dirichlet nodes; p is the discrete
// curl of a nodal field, which has zero weak divergence on every element.
TEST(SolveCfo, SolutionMinimizesJ2OverAdmissibleDirections) {
  for (int id : {1, 3, 5}) {
    const ProblemSpec spec = test_case(id);
    const Mesh m = build_perturbed(spec.domain, 6, 0.2, 23);
    const CfoSolution sol = solve_cfo(m, spec);
    const double j0 = j2_functional(m, spec, sol.u, sol.q);
    std::mt19937 gen(100 + id);
    std::uniform_real_distribution<double> dist(-1.0, 1.0);
    for (int trial = 0; trial < 20; ++trial) {
      std::vector<double> v(m.num_nodes(), 0.0), psi(m.num_nodes());
      for (int i = 0; i < m.num_nodes(); ++i) {
        if (!m.is_boundary_node(i)) v[i] = dist(gen);
        psi[i] = dist(gen);
      }
      std::vector<double> p(m.num_edges());
      for (int e = 0; e < m.num_edges(); ++e) {
        p[e] = (psi[m.edge(e)[1]] - psi[m.edge(e)[0]]) / m.edge_length(e);
      }
      for (int t = 0; t < m.num_elements(); ++t) {
        ASSERT_NEAR(weak_divergence(m, p, t) * m.area(t), 0.0, 1e-13);
      }
      for (double eps : {1e-3, -1e-3}) {
        std::vector<double> u1 = sol.u, q1 = sol.q;
        for (std::size_t i = 0; i < u1.size(); ++i) u1[i] += eps * v[i];
        for (std::size_t e = 0; e < q1.size(); ++e) q1[e] += eps * p[e];
        EXPECT_GE(j2_functional(m, spec, u1, q1), j0 - 1e-10)
            << "case " << id << " trial " << trial;
      }
    }
  }
}

TEST(SolveCfo, ReusedSolverGivesSameAnswer) {
  const ProblemSpec spec = test_case(2);
  const Mesh m = build_uniform(spec.domain, 12);
  SymmetricIndefiniteSolver solver;
  const CfoSolution a = solve_cfo(m, spec, solver);
  const CfoSolution b = solve_cfo(m, spec, solver);
  const CfoSolution c = solve_cfo(m, spec);
  EXPECT_EQ(a.q, b.q);
  EXPECT_EQ(a.q, c.q);
  EXPECT_EQ(a.u, c.u);
}

}  // namespace
}  // namespace cfo
