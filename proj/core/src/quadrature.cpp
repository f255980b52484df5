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

#include "cfo/quadrature.hpp"

#include <cmath>
#include <string>

#include "cfo/error.hpp"

namespace cfo {

namespace {

// Gauss-Legendre abscissae/weights on [-1, 1], listed for x >= 0.
QuadRule gauss_legendre(std::initializer_list<double> xs,
                        std::initializer_list<double> ws, int degree) {
  QuadRule rule;
  rule.degree = degree;
  auto x = xs.begin();
  auto w = ws.begin();
  for (; x != xs.end(); ++x, ++w) {
    if (*x == 0.0) {
      rule.points.push_back({0.5, 0.0});
      rule.weights.push_back(0.5 * *w);
      continue;
    }
    rule.points.push_back({0.5 * (1.0 - *x), 0.0});
    rule.weights.push_back(0.5 * *w);
    rule.points.push_back({0.5 * (1.0 + *x), 0.0});
    rule.weights.push_back(0.5 * *w);
  }
  return rule;
}

void push_orbit3(QuadRule& rule, double a, double w) {
  const double b = 1.0 - 2.0 * a;
  rule.points.push_back({a, a});
  rule.weights.push_back(w);
  rule.points.push_back({b, a});
  rule.weights.push_back(w);
  rule.points.push_back({a, b});
  rule.weights.push_back(w);
}

}  // namespace

QuadRule segment_rule(int points) {
  switch (points) {
    case 2:
      return gauss_legendre({1.0 / std::sqrt(3.0)}, {1.0}, 3);
    case 3:
      return gauss_legendre({0.0, std::sqrt(3.0 / 5.0)},
                            {8.0 / 9.0, 5.0 / 9.0}, 5);
    case 5: {
      const double s = 2.0 * std::sqrt(10.0 / 7.0);
      const double x1 = std::sqrt(5.0 - s) / 3.0;
      const double x2 = std::sqrt(5.0 + s) / 3.0;
      const double r = 13.0 * std::sqrt(70.0);
      return gauss_legendre({0.0, x1, x2},
                            {128.0 / 225.0, (322.0 + r) / 900.0,
                             (322.0 - r) / 900.0},
                            9);
    }
    default:
      throw Error("unsupported Gauss-Legendre order " + std::to_string(points));
  }
}

QuadRule triangle_rule(int degree) {
  QuadRule rule;
  rule.degree = degree;
  switch (degree) {
    case 2:
      push_orbit3(rule, 1.0 / 6.0, 1.0 / 6.0);
      break;
    case 4:
      // Dunavant, weights scaled to the reference area 1/2.
      push_orbit3(rule, 0.44594849091596488631832925388305,
                  0.5 * 0.22338158967801146569500700843312);
      push_orbit3(rule, 0.091576213509770743459571463402202,
                  0.5 * 0.10995174365532186763832632490021);
      break;
    case 5: {
      const double r15 = std::sqrt(15.0);
      rule.points.push_back({1.0 / 3.0, 1.0 / 3.0});
      rule.weights.push_back(0.5 * 9.0 / 40.0);
      push_orbit3(rule, (6.0 - r15) / 21.0, 0.5 * (155.0 - r15) / 1200.0);
      push_orbit3(rule, (6.0 + r15) / 21.0, 0.5 * (155.0 + r15) / 1200.0);
      break;
    }
    default:
      throw Error("unsupported triangle rule degree " + std::to_string(degree));
  }
  return rule;
}

}  // namespace cfo
