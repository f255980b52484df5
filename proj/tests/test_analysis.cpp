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
#include <sstream>

#include <gtest/gtest.h>

#include "cfo/analysis.hpp"
#include "cfo/error.hpp"
#include "cfo/test_cases.hpp"

namespace cfo {
namespace {

const Rectangle kUnit{{0.0, 0.0}, {1.0, 1.0}};

ProblemSpec linear_problem() {
  ProblemSpec spec;
  spec.name = "linear";
  spec.domain = kUnit;
  spec.alpha = [](const FieldPoint&) { return Mat2::identity(); };
  spec.source = [](const FieldPoint&) { return 0.0; };
  spec.exact = ExactSolution{
      [](const FieldPoint& p) { return 1.0 + 2.0 * p.x.x - p.x.y; },
      [](const FieldPoint&) { return Vec2{2.0, -1.0}; }};
  spec.dirichlet_g = [](const Vec2& x) { return 1.0 + 2.0 * x.x - x.y; };
  spec.dirichlet = whole_boundary();
  return spec;
}

ProblemSpec unit_constant_problem() {
  ProblemSpec spec = linear_problem();
  spec.exact = ExactSolution{[](const FieldPoint&) { return 1.0; },
                             [](const FieldPoint&) { return Vec2{}; }};
  return spec;
}

std::vector<double> random_sigma(int n, std::uint32_t seed) {
  std::mt19937 gen(seed);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  std::vector<double> s(n);
  for (double& x : s) x = u(gen);
  return s;
}

TEST(ErrorNorms, InterpolantOfLinearFunctionIsExact) {
  const ProblemSpec spec = linear_problem();
  const Mesh m = build_perturbed(kUnit, 6, 0.25, 8);
  std::vector<double> u(m.num_nodes());
  for (int v = 0; v < m.num_nodes(); ++v) u[v] = spec.dirichlet_g(m.node(v));
  EXPECT_LT(error_l2(m, u, spec), 1e-13);
  EXPECT_LT(error_h1(m, u, spec), 1e-13);
}

TEST(ErrorNorms, ZeroAgainstUnitSolution) {
  const ProblemSpec spec = unit_constant_problem();
  const Mesh m = build_uniform(kUnit, 4);
  const std::vector<double> zero(m.num_nodes(), 0.0);
  EXPECT_NEAR(error_l2(m, zero, spec), 1.0, 1e-14);
  EXPECT_NEAR(error_h1(m, zero, spec), 0.0, 1e-14);
}

TEST(ErrorNorms, MissingExactSolutionThrows) {
  ProblemSpec spec = linear_problem();
  spec.exact.reset();
  const Mesh m = build_uniform(kUnit, 2);
  const std::vector<double> u(m.num_nodes(), 0.0);
  const std::vector<double> q(m.num_edges(), 0.0);
  EXPECT_THROW(error_l2(m, u, spec), Error);
  EXPECT_THROW(flux_error(m, q, spec), Error);
}

TEST(FluxError, ExactEdgeFluxOfLinearSolutionIsZero) {
  const ProblemSpec spec = linear_problem();
  const Mesh m = build_perturbed(kUnit, 5, 0.2, 2);
  std::vector<double> q(m.num_edges());
  for (int e = 0; e < m.num_edges(); ++e) {
    q[e] = -dot(Vec2{2.0, -1.0}, m.edge_normal(e));
  }
  EXPECT_LT(flux_error(m, q, spec), 1e-13);
}

TEST(FluxError, CountsInteriorEdgesFromBothSides) {
  const ProblemSpec spec = linear_problem();
  const Mesh m = build_uniform(kUnit, 3);
  const std::vector<double> zero(m.num_edges(), 0.0);
  // |q . n_e| is constant per edge, so each (element, edge) pair adds
  // h_e |e| (grad u . n_e)^2.
  double expected = 0.0;
  for (int t = 0; t < m.num_elements(); ++t) {
    for (const ElementEdge& ee : m.element_edges(t)) {
      const double len = m.edge_length(ee.edge);
      const double qn = dot(Vec2{2.0, -1.0}, m.edge_normal(ee.edge));
      expected += len * len * qn * qn;
    }
  }
  EXPECT_NEAR(flux_error(m, zero, spec), std::sqrt(expected), 1e-13);
}

TEST(LambdaNorm, ConstantsOnUnitSquare) {
  const Mesh m = build_perturbed(kUnit, 7, 0.2, 1);
  EXPECT_NEAR(lambda_norm(m, std::vector<double>(m.num_elements(), 1.0)), 1.0,
              1e-14);
  EXPECT_EQ(lambda_norm(m, std::vector<double>(m.num_elements(), 0.0)), 0.0);
}

TEST(DiscreteH1Norm, ConstantSeesOnlyTheBoundary) {
  const Mesh m = build_uniform(kUnit, 5);
  const double c = 0.75;
  const std::vector<double> sigma(m.num_elements(), c);
  EXPECT_NEAR(discrete_h1_norm(m, sigma), std::sqrt(20.0 * c * c), 1e-14);
  EXPECT_EQ(discrete_h1_norm(m, std::vector<double>(m.num_elements(), 0.0)), 0.0);
}

TEST(DiscreteH1Norm, TwoElementParity) {
  const Mesh m = build_uniform(kUnit, 1);
  const std::vector<double> sigma{0.0, 1.0};
  // Diagonal jump 1, two boundary edges of element 1 with trace 1.
  EXPECT_NEAR(discrete_h1_norm(m, sigma), std::sqrt(3.0), 1e-15);
  const auto jumps = edge_jumps(m, sigma);
  double interior = 0.0;
  for (int e = 0; e < m.num_edges(); ++e) {
    if (!m.is_boundary_edge(e)) interior = jumps[e];
  }
  EXPECT_EQ(std::abs(interior), 1.0);
}

TEST(InfSupFlux, PairingEqualsDiscreteNormSquared) {
  const Mesh m = build_uniform(kUnit, 8);
  for (std::uint32_t seed = 0; seed < 100; ++seed) {
    const auto sigma = random_sigma(m.num_elements(), seed);
    const auto p = build_inf_sup_flux(m, sigma);
    const double norm = discrete_h1_norm(m, sigma);
    const double pairing = weak_divergence_pairing(m, p, sigma);
    EXPECT_NEAR(pairing, norm * norm, 1e-12 * norm * norm) << seed;
    EXPECT_NEAR(edge_flux_norm(m, p), norm, 1e-12 * norm) << seed;
  }
  const auto zero = build_inf_sup_flux(m, std::vector<double>(m.num_elements()));
  for (double v : zero) EXPECT_EQ(v, 0.0);
}

TEST(InfSupFlux, HoldsOnPerturbedMeshes) {
  const Mesh m = build_perturbed(kUnit, 8, 0.3, 99);
  const auto sigma = random_sigma(m.num_elements(), 5);
  const double norm = discrete_h1_norm(m, sigma);
  EXPECT_NEAR(weak_divergence_pairing(m, build_inf_sup_flux(m, sigma), sigma),
              norm * norm, 1e-12 * norm * norm);
}

ConvergenceRow synthetic_row(int n, double l2, double h1) {
  ConvergenceRow row;
  row.n = n;
  row.report.h = 1.0 / n;
  row.report.l2 = l2;
  row.report.h1 = h1;
  row.report.residual = h1;
  row.report.flux = h1;
  row.report.lambda = l2;
  row.report.u_l2 = 2.0;
  row.report.u_h1 = 4.0;
  row.report.q_norm = 8.0;
  return row;
}

TEST(ConvergenceTable, OrdersAndRoundingFloor) {
  const ConvergenceTable t({synthetic_row(4, 1.6e-2, 0.4),
                            synthetic_row(8, 4.0e-3, 0.2),
                            synthetic_row(16, 1e-13, 0.1)},
                           false);
  EXPECT_FALSE(t.order(0, Metric::kL2).has_value());
  EXPECT_NEAR(*t.order(1, Metric::kL2), 2.0, 1e-14);
  EXPECT_NEAR(*t.order(1, Metric::kH1), 1.0, 1e-14);
  EXPECT_FALSE(t.order(2, Metric::kL2).has_value());
  EXPECT_NEAR(*t.order(2, Metric::kFlux), 1.0, 1e-14);
}

TEST(ConvergenceTable, RelativeValuesDivideByExactNorms) {
  const ConvergenceTable t({synthetic_row(4, 1.0, 1.0)}, true);
  EXPECT_EQ(t.value(0, Metric::kL2), 0.5);
  EXPECT_EQ(t.value(0, Metric::kH1), 0.25);
  EXPECT_EQ(t.value(0, Metric::kFlux), 0.125);
  EXPECT_EQ(t.value(0, Metric::kResidual), 1.0);
  EXPECT_EQ(t.value(0, Metric::kLambda), 1.0);
}

TEST(ConvergenceStudy, RejectsBadLevels) {
  const ProblemSpec spec = test_case(1);
  const MeshFamily uniform;
  EXPECT_THROW(convergence_study(spec, uniform, std::vector<int>{}), ConfigError);
  EXPECT_THROW(convergence_study(spec, uniform, std::vector<int>{2, 3}),
               ConfigError);
  EXPECT_THROW(convergence_study(spec, uniform, std::vector<int>{0, 0}),
               ConfigError);
}

TEST(ConvergenceStudy, OrdersInvariantUnderDataScaling) {
  const ProblemSpec spec = test_case(1);
  ProblemSpec scaled = spec;
  scaled.source = [f = spec.source](const FieldPoint& p) { return 10.0 * f(p); };
  scaled.dirichlet_g = [g = spec.dirichlet_g](const Vec2& x) { return 10.0 * g(x); };
  const auto exact = *spec.exact;
  scaled.exact = ExactSolution{
      [exact](const FieldPoint& p) { return 10.0 * exact.u(p); },
      [exact](const FieldPoint& p) { return 10.0 * exact.gradient(p); }};
  const std::vector<int> levels{4, 8, 16};
  const auto a = convergence_study(spec, MeshFamily{}, levels);
  const auto b = convergence_study(scaled, MeshFamily{}, levels);
  for (std::size_t i = 1; i < levels.size(); ++i) {
    for (Metric m : kAllMetrics) {
      EXPECT_NEAR(*a.order(i, m), *b.order(i, m), 1e-9);
    }
    EXPECT_NEAR(b.value(i, Metric::kL2), 10.0 * a.value(i, Metric::kL2),
                1e-9 * a.value(i, Metric::kL2));
  }
}

TEST(ConvergenceStudy, SmoothCaseHasExpectedOrders) {
  const auto t = convergence_study(test_case(1), MeshFamily{},
                                   std::vector<int>{8, 16, 32});
  EXPECT_NEAR(*t.order(2, Metric::kL2), 2.0, 0.1);
  EXPECT_NEAR(*t.order(2, Metric::kH1), 1.0, 0.1);
  EXPECT_NEAR(*t.order(2, Metric::kResidual), 1.0, 0.1);
  EXPECT_NEAR(t.value(2, Metric::kL2), 1.99e-3, 0.05 * 1.99e-3);
  EXPECT_NEAR(t.value(2, Metric::kH1), 0.109, 0.05 * 0.109);
  EXPECT_NEAR(t.value(2, Metric::kResidual), 0.339, 0.05 * 0.339);
  for (const auto& row : t.rows()) {
    EXPECT_LE(row.max_conservation_defect, row.conservation_tolerance);
    EXPECT_EQ(row.report.h, 1.0 / row.n);
  }
}

TEST(ConvergenceStudy, ReportIdentities) {
  const ProblemSpec spec = test_case(4);
  const Mesh m = build_uniform(spec.domain, 8);
  const ErrorReport r = error_report(m, spec, solve_cfo(m, spec));
  EXPECT_GT(r.u_l2, 0.0);
  EXPECT_NEAR(r.relative_l2() * r.u_l2, r.l2, 1e-12 * r.l2);
  EXPECT_NEAR(r.relative_flux() * r.q_norm, r.flux, 1e-12 * r.flux);
  EXPECT_EQ(r.h, 0.25);
}

TEST(ConvergenceCsv, HeaderAndEmptyFirstOrders) {
  const ConvergenceTable t({synthetic_row(2, 0.1, 0.2), synthetic_row(4, 0.025, 0.1)},
                           false);
  std::ostringstream out;
  write_convergence_csv(out, t);
  std::istringstream in(out.str());
  std::string header, first, second;
  std::getline(in, header);
  std::getline(in, first);
  std::getline(in, second);
  EXPECT_EQ(header,
            "h,l2,l2_order,h1,h1_order,residual,residual_order,flux,flux_order,"
            "lambda,lambda_order");
  EXPECT_EQ(first, "0.5,0.10000000000000001,,0.20000000000000001,,"
                   "0.20000000000000001,,0.20000000000000001,,"
                   "0.10000000000000001,");
  EXPECT_EQ(second.substr(0, 28), "0.25,0.025000000000000001,2,");
}

TEST(MeshFamily, BuildsRequestedKind) {
  MeshFamily f;
  EXPECT_TRUE(f.build(kUnit, 4) == build_uniform(kUnit, 4));
  f.kind = MeshFamily::Kind::kPerturbed;
  f.magnitude = 0.2;
  f.seed = 3;
  EXPECT_TRUE(f.build(kUnit, 4) == build_perturbed(kUnit, 4, 0.2, 3));
}

}  // namespace
}  // namespace cfo
