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

#ifndef CFO_TWOPHASE_HPP_
#define CFO_TWOPHASE_HPP_

#include <span>
#include <vector>

#include "cfo/mesh.hpp"
#include "cfo/sparse.hpp"

namespace cfo {

// Heterogeneous permeability
//   [0.25 - 0.999 (x - x^2) sin(11.2 pi x)]^-1 [0.25 - 0.999 (y - y^2) sin(5.2 pi y)]^-1.
// Throws Error if a denominator is not positive.
double permeability(double x, double y);

// f(S) = S^2 / (S^2 + (1 - S)^2 / 5).
double fractional_flow(double s);

// lambda(S) = S^2 + (1 - S)^2 / 5.
double mobility(double s);

// Upper bound on f' over [0,1] used by the time step guard.
inline constexpr double kFractionalFlowLipschitz = 2.5;

enum class PermeabilityKind { kHeterogeneous, kUnit };

struct TwoPhaseConfig {
  int n = 64;
  double dt = 1e-5;
  double t_end = 0.002;
  int pressure_update_interval = 1;
  // Extra snapshot times in (0, t_end); t = 0 and t = t_end are always kept.
  std::vector<double> output_times;
  PermeabilityKind permeability = PermeabilityKind::kHeterogeneous;

  // Throws ConfigError unless dt > 0, t_end >= 0 and the interval is >= 1.
  void validate() const;
};

struct SaturationState {
  std::vector<double> S;  // per element
  double t = 0.0;
  std::vector<double> v;  // per edge, Darcy flux along n_e
};

// Darcy edge fluxes from the pressure equation
// -div(lambda(S_T) kappa grad p) = 0, p = 1 at x = 0, p = 0 at x = 1 and no
// flow through y = 0 and y = 1.
std::vector<double> pressure_solve(const Mesh& mesh, std::span<const double> S,
                                   PermeabilityKind kind,
                                   SymmetricIndefiniteSolver& solver);
std::vector<double> pressure_solve(const Mesh& mesh, std::span<const double> S,
                                   PermeabilityKind kind);

// Largest dt allowed by the guard
// dt sum_e |e| max(0, s(T,e) v_e) L_f / |T| <= 1; infinity when nothing flows
// out of any element.
double max_stable_dt(const Mesh& mesh, std::span<const double> v);

struct TransportDiagnostics {
  double inflow = 0.0;     // boundary inflow of f(S) flux over the step
  double outflow = 0.0;    // boundary outflow over the step
  double mass_change = 0.0;  // sum_T |T| (S_new - S_old) before clamping
  double balance_residual = 0.0;  // relative to the boundary exchange
  double min_s = 0.0;      // before clamping
  double max_s = 0.0;
};

// One explicit upwind step. Inflow through x = 0 carries S = 1, inflow
// through any other boundary edge carries S = 0. Throws TransportError on a
// time step guard violation or on a bound violation larger than 1e-9.
SaturationState transport_step(const Mesh& mesh, const SaturationState& state,
                               double dt, TransportDiagnostics* diag = nullptr);

struct SimulationResult {
  std::vector<SaturationState> snapshots;
  std::vector<TransportDiagnostics> steps;
};

// Operator split run from S = 0 on the uniform n x n mesh of (0,1)^2.
SimulationResult run_simulation(const TwoPhaseConfig& config);
SimulationResult run_simulation(const Mesh& mesh, const TwoPhaseConfig& config);

}  // namespace cfo

#endif  // CFO_TWOPHASE_HPP_
