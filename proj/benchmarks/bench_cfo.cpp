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

#include <benchmark/benchmark.h>

#include "cfo/assembly.hpp"
#include "cfo/test_cases.hpp"
#include "cfo/twophase.hpp"

namespace {

using namespace cfo;

void BM_Assemble(benchmark::State& state) {
  const ProblemSpec spec = test_case(2);
  const Mesh mesh = build_uniform(spec.domain, static_cast<int>(state.range(0)));
  for (auto _ : state) {
    CfoSystem sys = assemble_system(mesh, spec);
    benchmark::DoNotOptimize(sys.rhs.data());
  }
  state.counters["unknowns"] = assemble_system(mesh, spec).dofs.size();
}
BENCHMARK(BM_Assemble)->RangeMultiplier(2)->Range(16, 64)->Unit(benchmark::kMillisecond);

void BM_Solve(benchmark::State& state) {
  const ProblemSpec spec = test_case(1);
  const Mesh mesh = build_uniform(spec.domain, static_cast<int>(state.range(0)));
  for (auto _ : state) {
    CfoSolution sol = solve_cfo(mesh, spec);
    benchmark::DoNotOptimize(sol.q.data());
  }
}
BENCHMARK(BM_Solve)->RangeMultiplier(2)->Range(16, 64)->Unit(benchmark::kMillisecond);

void BM_PressureResolve(benchmark::State& state) {
  const Mesh mesh = build_uniform({{0.0, 0.0}, {1.0, 1.0}},
                                  static_cast<int>(state.range(0)));
  const std::vector<double> s(mesh.num_elements(), 0.0);
  SymmetricIndefiniteSolver solver;
  pressure_solve(mesh, s, PermeabilityKind::kHeterogeneous, solver);
  for (auto _ : state) {
    auto v = pressure_solve(mesh, s, PermeabilityKind::kHeterogeneous, solver);
    benchmark::DoNotOptimize(v.data());
  }
}
BENCHMARK(BM_PressureResolve)->Arg(16)->Arg(32)->Unit(benchmark::kMillisecond);

void BM_TransportStep(benchmark::State& state) {
  const Mesh mesh = build_uniform({{0.0, 0.0}, {1.0, 1.0}},
                                  static_cast<int>(state.range(0)));
  SaturationState st;
  st.S.assign(mesh.num_elements(), 0.0);
  st.v = pressure_solve(mesh, st.S, PermeabilityKind::kUnit);
  const double dt = 0.5 * max_stable_dt(mesh, st.v);
  for (auto _ : state) {
    SaturationState next = transport_step(mesh, st, dt);
    benchmark::DoNotOptimize(next.S.data());
  }
}
BENCHMARK(BM_TransportStep)->Arg(64)->Arg(128)->Unit(benchmark::kMicrosecond);

}  // namespace

BENCHMARK_MAIN();
