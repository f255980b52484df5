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

#ifndef CFO_QUADRATURE_HPP_
#define CFO_QUADRATURE_HPP_

#include <vector>

#include "cfo/geometry.hpp"

namespace cfo {

// Quadrature rule on a reference cell. For segment rules only `x` of each
// point is used (reference segment [0, 1], weights sum to 1); triangle rules
// live on the unit right triangle (weights sum to 1/2).
struct QuadRule {
  std::vector<Vec2> points;
  std::vector<double> weights;
  int degree = 0;

  std::size_t size() const { return weights.size(); }
};

// Gauss-Legendre rule with `points` nodes mapped to [0, 1]; points is 2, 3
// or 5 and the rule is exact to degree 2 * points - 1.
QuadRule segment_rule(int points);

// Symmetric triangle rules: 3 points (degree 2), 6 points (degree 4),
// 7 points (degree 5).
QuadRule triangle_rule(int degree);

// Rule choices used throughout assembly and error analysis.
namespace quad_defaults {
inline constexpr int kAssemblyEdgePoints = 3;
inline constexpr int kSourceTriangleDegree = 4;
inline constexpr int kErrorTriangleDegree = 5;
inline constexpr int kErrorEdgePoints = 5;
}  // namespace quad_defaults

}  // namespace cfo

#endif  // CFO_QUADRATURE_HPP_
