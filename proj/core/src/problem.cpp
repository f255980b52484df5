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

#include "cfo/problem.hpp"

#include "cfo/error.hpp"

namespace cfo {

double ProblemSpec::exact_flux(const FieldPoint& p, const Vec2& n) const {
  if (!exact) throw Error("problem '" + name + "' has no exact solution");
  const Vec2 flux = alpha(p) * exact->gradient(p) + exact->u(p) * beta_at(p);
  return -dot(flux, n);
}

BoundaryPredicate whole_boundary() {
  return [](const Vec2&) { return true; };
}

}  // namespace cfo
