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
#include <set>

#include <gtest/gtest.h>

#include "cfo/error.hpp"
#include "cfo/mesh.hpp"

namespace cfo {
namespace {

const Rectangle kUnit{{0.0, 0.0}, {1.0, 1.0}};

TEST(UniformMesh, CountsMatchClosedForms) {
  for (int n = 1; n <= 64; ++n) {
    const Mesh m = build_uniform(kUnit, n);
    EXPECT_EQ(m.num_nodes(), (n + 1) * (n + 1)) << n;
    EXPECT_EQ(m.num_elements(), 2 * n * n) << n;
    EXPECT_EQ(m.num_edges(), 3 * n * n + 2 * n) << n;
    int boundary = 0;
    for (int e = 0; e < m.num_edges(); ++e) boundary += m.is_boundary_edge(e);
    EXPECT_EQ(boundary, 4 * n) << n;
  }
}

TEST(UniformMesh, EdgeIncidenceSigns) {
  const Mesh m = build_uniform(kUnit, 7);
  std::vector<int> plus(m.num_edges(), 0), minus(m.num_edges(), 0);
  for (int t = 0; t < m.num_elements(); ++t) {
    for (const ElementEdge& ee : m.element_edges(t)) {
      ASSERT_TRUE(ee.sign == 1 || ee.sign == -1);
      (ee.sign > 0 ? plus : minus)[ee.edge]++;
    }
  }
  for (int e = 0; e < m.num_edges(); ++e) {
    const EdgeAdjacency& adj = m.edge_elements(e);
    if (m.is_boundary_edge(e)) {
      EXPECT_EQ(plus[e] + minus[e], 1);
    } else {
      EXPECT_EQ(plus[e], 1);
      EXPECT_EQ(minus[e], 1);
      EXPECT_NE(adj.left, kNoElement);
      EXPECT_NE(adj.right, kNoElement);
    }
  }
}

TEST(UniformMesh, SignIsOutwardNormalDotEdgeNormal) {
  const Mesh m = build_uniform(kUnit, 3);
  for (int t = 0; t < m.num_elements(); ++t) {
    const Vec2 c = m.centroid(t);
    for (const ElementEdge& ee : m.element_edges(t)) {
      const Vec2 out = m.edge_midpoint(ee.edge) - c;
      const double d = dot(out, m.edge_normal(ee.edge));
      EXPECT_EQ(d > 0.0 ? 1 : -1, ee.sign);
    }
  }
}

TEST(UniformMesh, GeometryOfCells) {
  const int n = 4;
  const Mesh m = build_uniform(kUnit, n);
  double total = 0.0;
  for (int t = 0; t < m.num_elements(); ++t) {
    EXPECT_NEAR(m.area(t), 0.5 / (n * n), 1e-15);
    EXPECT_NEAR(m.diameter(t), std::sqrt(2.0) / n, 1e-15);
    total += m.area(t);
  }
  EXPECT_NEAR(total, 1.0, 1e-14);
  EXPECT_DOUBLE_EQ(m.nominal_h(), 0.25);
}

TEST(UniformMesh, DiagonalRunsLowerLeftToUpperRight) {
  const Mesh m = build_uniform(kUnit, 1);
  ASSERT_EQ(m.num_edges(), 5);
  bool found = false;
  for (int e = 0; e < m.num_edges(); ++e) {
    const Vec2 a = m.node(m.edge(e)[0]);
    const Vec2 b = m.node(m.edge(e)[1]);
    if (a == Vec2{0.0, 0.0} && b == Vec2{1.0, 1.0}) {
      found = true;
      EXPECT_NEAR(m.edge_normal(e).x, 1.0 / std::sqrt(2.0), 1e-15);
      EXPECT_NEAR(m.edge_normal(e).y, -1.0 / std::sqrt(2.0), 1e-15);
    }
  }
  EXPECT_TRUE(found);
}

TEST(EdgeOrientation, RotatesTangentClockwise) {
  const std::vector<Vec2> p{{0.0, 0.0}, {2.0, 0.0}, {0.0, 3.0}};
  const Vec2 n01 = edge_orientation(0, 1, p);
  EXPECT_DOUBLE_EQ(n01.x, 0.0);
  EXPECT_DOUBLE_EQ(n01.y, -1.0);
  const Vec2 n02 = edge_orientation(0, 2, p);
  EXPECT_DOUBLE_EQ(n02.x, 1.0);
  EXPECT_DOUBLE_EQ(n02.y, 0.0);
  EXPECT_THROW(edge_orientation(1, 0, p), MeshError);
  EXPECT_THROW(edge_orientation(1, 1, p), MeshError);
}

TEST(MeshValidation, RejectsBadInput) {
  EXPECT_THROW(build_uniform(kUnit, 0), MeshError);
  EXPECT_THROW(build_uniform({{0.0, 0.0}, {0.0, 1.0}}, 2), MeshError);
  // Clockwise triangle.
  EXPECT_THROW(Mesh({{0, 0}, {0, 1}, {1, 0}}, {{0, 1, 2}}), MeshError);
  // Degenerate triangle.
  EXPECT_THROW(Mesh({{0, 0}, {1, 1}, {2, 2}}, {{0, 1, 2}}), MeshError);
  // Two triangles overlapping with the same orientation of a shared edge.
  EXPECT_THROW(Mesh({{0, 0}, {1, 0}, {0, 1}, {1, 1}}, {{0, 1, 2}, {0, 1, 3}}),
               MeshError);
}

TEST(PerturbedMesh, ZeroMagnitudeIsUniform) {
  EXPECT_TRUE(build_perturbed(kUnit, 8, 0.0, 42) == build_uniform(kUnit, 8));
}

TEST(PerturbedMesh, ReproducibleAndSeedDependent) {
  const Mesh a = build_perturbed(kUnit, 16, 0.2, 7);
  const Mesh b = build_perturbed(kUnit, 16, 0.2, 7);
  const Mesh c = build_perturbed(kUnit, 16, 0.2, 8);
  EXPECT_TRUE(a == b);
  EXPECT_FALSE(a == c);
}

TEST(PerturbedMesh, BoundaryFixedAndDisplacementBounded) {
  const int n = 16;
  const double mag = 0.3;
  const Mesh u = build_uniform(kUnit, n);
  const Mesh p = build_perturbed(kUnit, n, mag, 3);
  ASSERT_EQ(u.num_nodes(), p.num_nodes());
  for (int i = 0; i < u.num_nodes(); ++i) {
    const double d = norm(p.node(i) - u.node(i));
    if (u.is_boundary_node(i)) {
      EXPECT_EQ(d, 0.0);
    } else {
      EXPECT_LE(d, mag / n + 1e-15);
    }
  }
  for (int t = 0; t < p.num_elements(); ++t) EXPECT_GT(p.area(t), 0.0);
}

TEST(PerturbedMesh, RejectsMagnitudeOutsideRange) {
  EXPECT_THROW(build_perturbed(kUnit, 4, 0.31, 1), MeshError);
  EXPECT_THROW(build_perturbed(kUnit, 4, -0.01, 1), MeshError);
}

TEST(Lcg64, KnownFirstDrawsAndRange) {
  Lcg64 a(0);
  EXPECT_EQ(a.next(), Lcg64::kIncrement);
  EXPECT_EQ(a.next(), Lcg64::kIncrement * Lcg64::kMultiplier + Lcg64::kIncrement);
  Lcg64 b(12345);
  for (int i = 0; i < 10000; ++i) {
    const double u = b.uniform();
    ASSERT_GE(u, 0.0);
    ASSERT_LT(u, 1.0);
  }
}

TEST(BoundaryMarking, SplitsDirichletAndNeumann) {
  const Mesh m = build_uniform(kUnit, 4);
  const auto marking = mark_boundary(
      m, [](const Vec2& x) { return x.x < 1e-12 || x.x > 1.0 - 1e-12; },
      [](const Vec2& x) { return x.y < 1e-12 || x.y > 1.0 - 1e-12; });
  int dir = 0, neu = 0;
  for (int e = 0; e < m.num_edges(); ++e) {
    if (marking.edge[e] == BoundaryTag::kDirichlet) ++dir;
    if (marking.edge[e] == BoundaryTag::kNeumann) ++neu;
    if (!m.is_boundary_edge(e)) EXPECT_EQ(marking.edge[e], BoundaryTag::kInterior);
  }
  EXPECT_EQ(dir, 8);
  EXPECT_EQ(neu, 8);
  // Corner nodes touch a Dirichlet edge.
  EXPECT_EQ(marking.node[0], BoundaryTag::kDirichlet);
  // Bottom midside node touches Neumann edges only.
  EXPECT_EQ(marking.node[2], BoundaryTag::kNeumann);
}

TEST(BoundaryMarking, RejectsUnclassifiedAndDoublyClassifiedEdges) {
  const Mesh m = build_uniform(kUnit, 2);
  const BoundaryPredicate left = [](const Vec2& x) { return x.x < 1e-12; };
  const BoundaryPredicate all = [](const Vec2&) { return true; };
  const BoundaryPredicate none = [](const Vec2&) { return false; };
  EXPECT_THROW(mark_boundary(m, left, none), AssemblyError);
  EXPECT_THROW(mark_boundary(m, all, left), AssemblyError);
  EXPECT_NO_THROW(mark_boundary(m, all, none));
}

}  // namespace
}  // namespace cfo
