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

#ifndef CFO_PROBLEM_HPP_
#define CFO_PROBLEM_HPP_

#include <functional>
#include <optional>
#include <string>

#include "cfo/geometry.hpp"
#include "cfo/mesh.hpp"

namespace cfo {

// Where a coefficient is evaluated. Fields are always sampled from inside a
// specific element, so a point on an interface yields the one-sided trace of
// that element; discontinuous fields select their branch from `element` or
// `centroid` rather than from `x`.
struct FieldPoint {
  Vec2 x;
  int element = -1;
  Vec2 centroid;
};

using TensorField = std::function<Mat2(const FieldPoint&)>;
using VectorField = std::function<Vec2(const FieldPoint&)>;
using ScalarField = std::function<double(const FieldPoint&)>;
using BoundaryData = std::function<double(const Vec2&)>;

struct ExactSolution {
  ScalarField u;
  VectorField gradient;
};

// Convection-diffusion problem -div(alpha grad u + beta u) = f with Dirichlet
// data g on the segments selected by `dirichlet` and zero normal flux on the
// segments selected by `neumann_zero`.
struct ProblemSpec {
  std::string name;
  Rectangle domain;
  TensorField alpha;
  VectorField beta;  // empty means beta = 0
  ScalarField source;
  BoundaryData dirichlet_g;
  BoundaryPredicate dirichlet;
  BoundaryPredicate neumann_zero;
  std::optional<ExactSolution> exact;
  // Per-element weight tau_T on the flux functional; empty means 1.
  std::function<double(int)> element_weight;

  Vec2 beta_at(const FieldPoint& p) const { return beta ? beta(p) : Vec2{}; }
  double weight(int element) const {
    return element_weight ? element_weight(element) : 1.0;
  }

  // Exact flux -(alpha grad u + beta u) . n from the element side of `p`.
  // Requires `exact`.
  double exact_flux(const FieldPoint& p, const Vec2& n) const;
};

// Predicate selecting every boundary point.
BoundaryPredicate whole_boundary();

}  // namespace cfo

#endif  // CFO_PROBLEM_HPP_
