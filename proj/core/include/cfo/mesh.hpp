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

#ifndef CFO_MESH_HPP_
#define CFO_MESH_HPP_

#include <array>
#include <cstdint>
#include <functional>
#include <span>
#include <vector>

#include "cfo/geometry.hpp"

namespace cfo {

// Axis-aligned rectangle [lower.x, upper.x] x [lower.y, upper.y].
struct Rectangle {
  Vec2 lower;
  Vec2 upper;

  double width() const { return upper.x - lower.x; }
  double height() const { return upper.y - lower.y; }
  double area() const { return width() * height(); }
};

inline constexpr int kNoElement = -1;

// One edge of a triangle together with the sign factor s(T,e) = n . n_e,
// where n is the outward normal of the triangle on that edge.
struct ElementEdge {
  int edge = -1;
  int sign = 0;
};

// Elements adjacent to an edge. `left` is the element from which the edge
// normal n_e points outward (sign +1), `right` the one it points into
// (sign -1). Boundary edges have exactly one of the two set.
struct EdgeAdjacency {
  int left = kNoElement;
  int right = kNoElement;

  bool is_boundary() const { return left == kNoElement || right == kNoElement; }
  int interior_element() const { return left != kNoElement ? left : right; }
};

// Conforming triangulation with globally oriented edges.
//
// Edges are stored as node pairs (a, b) with a < b and carry the normal
// n_e = (t_y, -t_x) where t is the unit tangent from a to b. Local edge k of
// a triangle joins its vertices k and k+1 (mod 3). Immutable once built.
class Mesh {
 public:
  // Builds all derived topology. Triangles must be counterclockwise with
  // strictly positive area; throws MeshError otherwise or if the
  // triangulation is non-conforming.
  Mesh(std::vector<Vec2> nodes, std::vector<std::array<int, 3>> triangles,
       double nominal_h = 0.0);

  int num_nodes() const { return static_cast<int>(nodes_.size()); }
  int num_edges() const { return static_cast<int>(edges_.size()); }
  int num_elements() const { return static_cast<int>(triangles_.size()); }

  std::span<const Vec2> nodes() const { return nodes_; }
  const Vec2& node(int i) const { return nodes_[i]; }
  const std::array<int, 3>& triangle(int t) const { return triangles_[t]; }
  const std::array<int, 2>& edge(int e) const { return edges_[e]; }
  const Vec2& edge_normal(int e) const { return edge_normals_[e]; }
  double edge_length(int e) const { return edge_lengths_[e]; }
  Vec2 edge_midpoint(int e) const {
    return 0.5 * (nodes_[edges_[e][0]] + nodes_[edges_[e][1]]);
  }
  const std::array<ElementEdge, 3>& element_edges(int t) const {
    return element_edges_[t];
  }
  const EdgeAdjacency& edge_elements(int e) const { return edge_elements_[e]; }
  bool is_boundary_edge(int e) const { return edge_elements_[e].is_boundary(); }
  bool is_boundary_node(int n) const { return boundary_node_[n] != 0; }

  double area(int t) const { return areas_[t]; }
  // Diameter h_T, the longest edge of the triangle.
  double diameter(int t) const { return diameters_[t]; }
  Vec2 centroid(int t) const;

  // Cell size of the structured family the mesh came from, 0 if unknown.
  double nominal_h() const { return nominal_h_; }

  friend bool operator==(const Mesh& a, const Mesh& b) {
    return a.nodes_ == b.nodes_ && a.triangles_ == b.triangles_;
  }

 private:
  std::vector<Vec2> nodes_;
  std::vector<std::array<int, 3>> triangles_;
  std::vector<std::array<int, 2>> edges_;
  std::vector<Vec2> edge_normals_;
  std::vector<double> edge_lengths_;
  std::vector<std::array<ElementEdge, 3>> element_edges_;
  std::vector<EdgeAdjacency> edge_elements_;
  std::vector<std::uint8_t> boundary_node_;
  std::vector<double> areas_;
  std::vector<double> diameters_;
  double nominal_h_ = 0.0;
};

// Unit normal of the edge from node a to node b (a < b): the tangent rotated
// by -90 degrees. Throws MeshError for a >= b or coincident nodes.
Vec2 edge_orientation(int a, int b, std::span<const Vec2> coords);

// n x n cells, each split along the lower-left to upper-right diagonal.
Mesh build_uniform(const Rectangle& domain, int n);

// Uniform mesh with interior nodes displaced by up to magnitude * h in a
// disc, driven by Lcg64 seeded with `seed`. Boundary nodes stay put.
Mesh build_perturbed(const Rectangle& domain, int n, double magnitude,
                     std::uint64_t seed);

// 64-bit linear congruential generator used for mesh perturbation. Its
// constants are fixed so meshes are reproducible bit for bit.
class Lcg64 {
 public:
  static constexpr std::uint64_t kMultiplier = 6364136223846793005ULL;
  static constexpr std::uint64_t kIncrement = 1442695040888963407ULL;

  explicit Lcg64(std::uint64_t seed) : state_(seed) {}

  std::uint64_t next() {
    state_ = state_ * kMultiplier + kIncrement;
    return state_;
  }
  // Uniform double in [0, 1) from the top 53 bits of the next draw.
  double uniform() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }

 private:
  std::uint64_t state_;
};

enum class BoundaryTag : std::uint8_t { kInterior, kDirichlet, kNeumann };

// Boundary classification derived from a problem's predicates. Nodes touching
// any Dirichlet edge are Dirichlet.
struct BoundaryMarking {
  std::vector<BoundaryTag> node;
  std::vector<BoundaryTag> edge;
};

using BoundaryPredicate = std::function<bool(const Vec2&)>;

// Evaluates both predicates at every boundary edge midpoint. Throws
// AssemblyError when an edge is selected by neither or by both.
BoundaryMarking mark_boundary(const Mesh& mesh,
                              const BoundaryPredicate& dirichlet,
                              const BoundaryPredicate& neumann_zero);

}  // namespace cfo

#endif  // CFO_MESH_HPP_
