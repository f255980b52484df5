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

#include "cfo/mesh.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>
#include <tuple>

#include "cfo/error.hpp"

namespace cfo {

namespace {

double signed_area(const Vec2& a, const Vec2& b, const Vec2& c) {
  return 0.5 * cross(b - a, c - a);
}

struct EdgeIncidence {
  int lo;
  int hi;
  int element;
  int local;
};

}  // namespace

Vec2 edge_orientation(int a, int b, std::span<const Vec2> coords) {
  if (a >= b) {
    throw MeshError("edge orientation requires a < b, got (" +
                    std::to_string(a) + ", " + std::to_string(b) + ")");
  }
  const Vec2 d = coords[b] - coords[a];
  const double len = norm(d);
  if (!(len > 0.0)) {
    throw MeshError("coincident nodes " + std::to_string(a) + " and " +
                    std::to_string(b));
  }
  return {d.y / len, -d.x / len};
}

Mesh::Mesh(std::vector<Vec2> nodes, std::vector<std::array<int, 3>> triangles,
           double nominal_h)
    : nodes_(std::move(nodes)),
      triangles_(std::move(triangles)),
      nominal_h_(nominal_h) {
  const int nn = num_nodes();
  const int nt = num_elements();

  areas_.resize(nt);
  diameters_.resize(nt);
  std::vector<EdgeIncidence> incidences;
  incidences.reserve(3 * static_cast<std::size_t>(nt));
  for (int t = 0; t < nt; ++t) {
    const auto& tri = triangles_[t];
    for (int v : tri) {
      if (v < 0 || v >= nn) {
        throw MeshError("triangle " + std::to_string(t) +
                        " references node out of range");
      }
    }
    const Vec2& p0 = nodes_[tri[0]];
    const Vec2& p1 = nodes_[tri[1]];
    const Vec2& p2 = nodes_[tri[2]];
    areas_[t] = signed_area(p0, p1, p2);
    if (!(areas_[t] > 0.0)) {
      throw MeshError("triangle " + std::to_string(t) +
                      " has nonpositive signed area");
    }
    diameters_[t] = std::max({norm(p1 - p0), norm(p2 - p1), norm(p0 - p2)});
    for (int k = 0; k < 3; ++k) {
      const int a = tri[k];
      const int b = tri[(k + 1) % 3];
      incidences.push_back({std::min(a, b), std::max(a, b), t, k});
    }
  }

  std::sort(incidences.begin(), incidences.end(),
            [](const EdgeIncidence& l, const EdgeIncidence& r) {
              return std::tie(l.lo, l.hi, l.element, l.local) <
                     std::tie(r.lo, r.hi, r.element, r.local);
            });

  element_edges_.resize(nt);
  boundary_node_.assign(nn, 0);
  for (std::size_t i = 0; i < incidences.size();) {
    std::size_t j = i;
    while (j < incidences.size() && incidences[j].lo == incidences[i].lo &&
           incidences[j].hi == incidences[i].hi) {
      ++j;
    }
    if (j - i > 2) {
      throw MeshError("edge shared by more than two triangles");
    }
    const int e = num_edges();
    const int lo = incidences[i].lo;
    const int hi = incidences[i].hi;
    edges_.push_back({lo, hi});
    edge_normals_.push_back(edge_orientation(lo, hi, nodes_));
    edge_lengths_.push_back(norm(nodes_[hi] - nodes_[lo]));

    EdgeAdjacency adj;
    for (std::size_t k = i; k < j; ++k) {
      const auto& inc = incidences[k];
      const int a = triangles_[inc.element][inc.local];
      const int sign = a == lo ? +1 : -1;
      element_edges_[inc.element][inc.local] = {e, sign};
      int& slot = sign > 0 ? adj.left : adj.right;
      if (slot != kNoElement) {
        throw MeshError("edge traversed twice in the same direction; "
                        "triangles are not consistently oriented");
      }
      slot = inc.element;
    }
    if (adj.is_boundary()) {
      boundary_node_[lo] = 1;
      boundary_node_[hi] = 1;
    }
    edge_elements_.push_back(adj);
    i = j;
  }
}

Vec2 Mesh::centroid(int t) const {
  const auto& tri = triangles_[t];
  return (1.0 / 3.0) * (nodes_[tri[0]] + nodes_[tri[1]] + nodes_[tri[2]]);
}

namespace {

void check_domain(const Rectangle& domain, int n) {
  if (n < 1) {
    throw MeshError("subdivision count must be at least 1, got " +
                    std::to_string(n));
  }
  if (!(domain.width() > 0.0) || !(domain.height() > 0.0)) {
    throw MeshError("domain rectangle has zero or negative area");
  }
}

std::vector<Vec2> grid_nodes(const Rectangle& domain, int n) {
  std::vector<Vec2> nodes;
  nodes.reserve(static_cast<std::size_t>(n + 1) * (n + 1));
  for (int j = 0; j <= n; ++j) {
    // Exact endpoints regardless of rounding in the step.
    const double y = j == n ? domain.upper.y
                            : domain.lower.y + domain.height() * j / n;
    for (int i = 0; i <= n; ++i) {
      const double x = i == n ? domain.upper.x
                              : domain.lower.x + domain.width() * i / n;
      nodes.push_back({x, y});
    }
  }
  return nodes;
}

std::vector<std::array<int, 3>> grid_triangles(int n) {
  std::vector<std::array<int, 3>> tris;
  tris.reserve(2 * static_cast<std::size_t>(n) * n);
  const auto id = [n](int i, int j) { return j * (n + 1) + i; };
  for (int j = 0; j < n; ++j) {
    for (int i = 0; i < n; ++i) {
      const int a = id(i, j);
      const int b = id(i + 1, j);
      const int c = id(i + 1, j + 1);
      const int d = id(i, j + 1);
      tris.push_back({a, b, c});
      tris.push_back({a, c, d});
    }
  }
  return tris;
}

double cell_size(const Rectangle& domain, int n) {
  return std::min(domain.width(), domain.height()) / n;
}

}  // namespace

Mesh build_uniform(const Rectangle& domain, int n) {
  check_domain(domain, n);
  return Mesh(grid_nodes(domain, n), grid_triangles(n), cell_size(domain, n));
}

Mesh build_perturbed(const Rectangle& domain, int n, double magnitude,
                     std::uint64_t seed) {
  check_domain(domain, n);
  if (!(magnitude >= 0.0 && magnitude <= 0.3)) {
    throw MeshError("perturbation magnitude must lie in [0, 0.3]");
  }
  const double h = cell_size(domain, n);
  std::vector<Vec2> base = grid_nodes(domain, n);
  const auto tris = grid_triangles(n);
  if (magnitude == 0.0) {
    return Mesh(std::move(base), tris, h);
  }

  const auto on_boundary = [n](int node) {
    const int i = node % (n + 1);
    const int j = node / (n + 1);
    return i == 0 || j == 0 || i == n || j == n;
  };

  Lcg64 rng(seed);
  std::vector<Vec2> offset(base.size());
  for (std::size_t v = 0; v < base.size(); ++v) {
    if (on_boundary(static_cast<int>(v))) continue;
    const double radius = magnitude * h * std::sqrt(rng.uniform());
    const double theta = 2.0 * std::numbers::pi * rng.uniform();
    offset[v] = {radius * std::cos(theta), radius * std::sin(theta)};
  }

  std::vector<Vec2> nodes(base.size());
  for (int attempt = 0;; ++attempt) {
    for (std::size_t v = 0; v < base.size(); ++v) nodes[v] = base[v] + offset[v];
    std::vector<int> offending;
    for (const auto& tri : tris) {
      if (signed_area(nodes[tri[0]], nodes[tri[1]], nodes[tri[2]]) > 0.0) {
        continue;
      }
      offending.insert(offending.end(), tri.begin(), tri.end());
    }
    if (offending.empty()) break;
    if (attempt == 8) {
      throw MeshError("perturbed mesh still has inverted triangles after 8 "
                      "halvings");
    }
    std::sort(offending.begin(), offending.end());
    offending.erase(std::unique(offending.begin(), offending.end()),
                    offending.end());
    for (int v : offending) offset[v] *= 0.5;
  }
  return Mesh(std::move(nodes), tris, h);
}

BoundaryMarking mark_boundary(const Mesh& mesh,
                              const BoundaryPredicate& dirichlet,
                              const BoundaryPredicate& neumann_zero) {
  BoundaryMarking marking;
  marking.node.assign(mesh.num_nodes(), BoundaryTag::kInterior);
  marking.edge.assign(mesh.num_edges(), BoundaryTag::kInterior);
  for (int e = 0; e < mesh.num_edges(); ++e) {
    if (!mesh.is_boundary_edge(e)) continue;
    const Vec2 mid = mesh.edge_midpoint(e);
    const bool d = dirichlet && dirichlet(mid);
    const bool nz = neumann_zero && neumann_zero(mid);
    if (d == nz) {
      throw AssemblyError(
          std::string("boundary edge ") + std::to_string(e) + " at (" +
          std::to_string(mid.x) + ", " + std::to_string(mid.y) + ") is " +
          (d ? "classified both Dirichlet and Neumann" : "unclassified"));
    }
    marking.edge[e] = d ? BoundaryTag::kDirichlet : BoundaryTag::kNeumann;
  }
  for (int e = 0; e < mesh.num_edges(); ++e) {
    const BoundaryTag tag = marking.edge[e];
    if (tag == BoundaryTag::kInterior) continue;
    for (int v : mesh.edge(e)) {
      if (tag == BoundaryTag::kDirichlet ||
          marking.node[v] == BoundaryTag::kInterior) {
        marking.node[v] = tag;
      }
    }
  }
  return marking;
}

}  // namespace cfo
