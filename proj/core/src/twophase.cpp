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

#include "cfo/twophase.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <sstream>

#include "cfo/assembly.hpp"
#include "cfo/error.hpp"
#include "cfo/problem.hpp"

namespace cfo {

namespace {

constexpr double kBoundaryTol = 1e-12;
constexpr double kClampTol = 1e-9;

}  // namespace

double permeability(double x, double y) {
  using std::numbers::pi;
  const double dx = 0.25 - 0.999 * (x - x * x) * std::sin(11.2 * pi * x);
  const double dy = 0.25 - 0.999 * (y - y * y) * std::sin(5.2 * pi * y);
  if (!(dx > 0.0) || !(dy > 0.0)) {
    std::ostringstream msg;
    msg << "permeability denominator not positive at (" << x << ", " << y
        << ")";
    throw Error(msg.str());
  }
  return 1.0 / (dx * dy);
}

double fractional_flow(double s) {
  const double w = s * s;
  return w / (w + (1.0 - s) * (1.0 - s) / 5.0);
}

double mobility(double s) { return s * s + (1.0 - s) * (1.0 - s) / 5.0; }

void TwoPhaseConfig::validate() const {
  if (n < 1) throw ConfigError("two-phase n must be positive");
  if (!(dt > 0.0)) throw ConfigError("two-phase dt must be positive");
  if (!(t_end >= 0.0)) throw ConfigError("two-phase t_end must be >= 0");
  if (pressure_update_interval < 1) {
    throw ConfigError("pressure update interval must be >= 1");
  }
  for (double t : output_times) {
    if (!(t >= 0.0) || t > t_end) {
      throw ConfigError("output times must lie in [0, t_end]");
    }
  }
}

std::vector<double> pressure_solve(const Mesh& mesh, std::span<const double> S,
                                   PermeabilityKind kind,
                                   SymmetricIndefiniteSolver& solver) {
  if (S.size() != static_cast<std::size_t>(mesh.num_elements())) {
    throw Error("saturation size does not match the mesh");
  }
  std::vector<double> lambda(S.size());
  std::transform(S.begin(), S.end(), lambda.begin(), mobility);

  ProblemSpec spec;
  spec.name = "pressure";
  spec.domain = {{0.0, 0.0}, {1.0, 1.0}};
  if (kind == PermeabilityKind::kUnit) {
    spec.alpha = [&lambda](const FieldPoint& p) {
      return Mat2::scalar(lambda[p.element]);
    };
  } else {
    spec.alpha = [&lambda](const FieldPoint& p) {
      return Mat2::scalar(lambda[p.element] * permeability(p.x.x, p.x.y));
    };
  }
  spec.source = [](const FieldPoint&) { return 0.0; };
  spec.dirichlet_g = [](const Vec2& x) { return x.x < 0.5 ? 1.0 : 0.0; };
  spec.dirichlet = [](const Vec2& x) {
    return x.x < kBoundaryTol || x.x > 1.0 - kBoundaryTol;
  };
  spec.neumann_zero = [](const Vec2& x) {
    return x.y < kBoundaryTol || x.y > 1.0 - kBoundaryTol;
  };
  return solve_cfo(mesh, spec, solver).q;
}

std::vector<double> pressure_solve(const Mesh& mesh, std::span<const double> S,
                                   PermeabilityKind kind) {
  SymmetricIndefiniteSolver solver;
  return pressure_solve(mesh, S, kind, solver);
}

namespace {

// Outflow rate sum_e |e| max(0, s v_e) L_f / |T| of one element.
double outflow_rate(const Mesh& mesh, std::span<const double> v, int t) {
  double rate = 0.0;
  for (const ElementEdge& ee : mesh.element_edges(t)) {
    rate += mesh.edge_length(ee.edge) * std::max(0.0, ee.sign * v[ee.edge]);
  }
  return rate * kFractionalFlowLipschitz / mesh.area(t);
}

}  // namespace

double max_stable_dt(const Mesh& mesh, std::span<const double> v) {
  double worst = 0.0;
  for (int t = 0; t < mesh.num_elements(); ++t) {
    worst = std::max(worst, outflow_rate(mesh, v, t));
  }
  return worst > 0.0 ? 1.0 / worst : std::numeric_limits<double>::infinity();
}

SaturationState transport_step(const Mesh& mesh, const SaturationState& state,
                               double dt, TransportDiagnostics* diag) {
  const int ne = mesh.num_elements();
  if (state.S.size() != static_cast<std::size_t>(ne) ||
      state.v.size() != static_cast<std::size_t>(mesh.num_edges())) {
    throw TransportError("saturation state does not match the mesh");
  }
  for (int t = 0; t < ne; ++t) {
    const double rate = outflow_rate(mesh, state.v, t);
    if (dt * rate > 1.0) {
      std::ostringstream msg;
      msg.precision(3);
      msg << "time step guard violated on element " << t << " (dt * rate = "
          << dt * rate << "); suggested dt <= " << max_stable_dt(mesh, state.v);
      throw TransportError(msg.str());
    }
  }

  // Upwinded f(S) flux through each edge along n_e.
  std::vector<double> flux(mesh.num_edges(), 0.0);
  double inflow = 0.0;
  double outflow = 0.0;
  for (int e = 0; e < mesh.num_edges(); ++e) {
    const double ve = state.v[e];
    if (ve == 0.0) continue;
    const EdgeAdjacency& adj = mesh.edge_elements(e);
    const int upwind = ve > 0.0 ? adj.left : adj.right;
    double s_up;
    if (upwind != kNoElement) {
      s_up = state.S[upwind];
    } else {
      s_up = mesh.edge_midpoint(e).x < kBoundaryTol ? 1.0 : 0.0;
    }
    flux[e] = mesh.edge_length(e) * ve * fractional_flow(s_up);
    if (adj.is_boundary()) {
      const int sign = adj.left != kNoElement ? 1 : -1;
      const double out = sign * flux[e];
      if (out > 0.0) {
        outflow += out;
      } else {
        inflow -= out;
      }
    }
  }

  SaturationState next;
  next.t = state.t + dt;
  next.v = state.v;
  next.S.resize(ne);
  double mass_change = 0.0;
  double min_s = std::numeric_limits<double>::infinity();
  double max_s = -std::numeric_limits<double>::infinity();
  for (int t = 0; t < ne; ++t) {
    double net = 0.0;
    for (const ElementEdge& ee : mesh.element_edges(t)) {
      net += ee.sign * flux[ee.edge];
    }
    const double s = state.S[t] - dt * net / mesh.area(t);
    mass_change += mesh.area(t) * (s - state.S[t]);
    min_s = std::min(min_s, s);
    max_s = std::max(max_s, s);
    if (s < -kClampTol || s > 1.0 + kClampTol) {
      std::ostringstream msg;
      msg << "saturation " << s << " out of bounds on element " << t;
      throw TransportError(msg.str());
    }
    next.S[t] = std::clamp(s, 0.0, 1.0);
  }

  if (diag) {
    diag->inflow = dt * inflow;
    diag->outflow = dt * outflow;
    diag->mass_change = mass_change;
    const double exchange = diag->inflow - diag->outflow;
    const double scale = std::max({diag->inflow + diag->outflow,
                                   std::abs(mass_change),
                                   std::numeric_limits<double>::min()});
    diag->balance_residual = std::abs(mass_change - exchange) / scale;
    diag->min_s = min_s;
    diag->max_s = max_s;
  }
  return next;
}

SimulationResult run_simulation(const TwoPhaseConfig& config) {
  config.validate();
  return run_simulation(build_uniform({{0.0, 0.0}, {1.0, 1.0}}, config.n),
                        config);
}

SimulationResult run_simulation(const Mesh& mesh, const TwoPhaseConfig& config) {
  config.validate();
  const double ratio = config.t_end / config.dt;
  long long steps = std::llround(ratio);
  if (std::abs(ratio - static_cast<double>(steps)) > 1e-9 * std::max(1.0, ratio)) {
    steps = static_cast<long long>(std::ceil(ratio));
  }

  std::vector<double> pending = config.output_times;
  std::sort(pending.begin(), pending.end());
  std::size_t next_output = 0;
  while (next_output < pending.size() && pending[next_output] <= 0.0) {
    ++next_output;
  }

  SimulationResult result;
  SaturationState state;
  state.S.assign(mesh.num_elements(), 0.0);
  state.v.assign(mesh.num_edges(), 0.0);
  SymmetricIndefiniteSolver solver;
  state.v = pressure_solve(mesh, state.S, config.permeability, solver);
  result.snapshots.push_back(state);

  const double time_tol = 1e-9 * config.dt;
  for (long long k = 0; k < steps; ++k) {
    if (k > 0 && k % config.pressure_update_interval == 0) {
      state.v = pressure_solve(mesh, state.S, config.permeability, solver);
    }
    const double t_next =
        std::min(config.t_end, static_cast<double>(k + 1) * config.dt);
    TransportDiagnostics diag;
    state = transport_step(mesh, state, t_next - state.t, &diag);
    state.t = t_next;
    result.steps.push_back(diag);

    const bool last = k + 1 == steps;
    bool emit = last;
    while (next_output < pending.size() &&
           pending[next_output] <= t_next + time_tol) {
      emit = true;
      ++next_output;
    }
    if (emit) result.snapshots.push_back(state);
  }
  return result;
}

}  // namespace cfo
