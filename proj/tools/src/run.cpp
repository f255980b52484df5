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

#include <cstdio>
#include <ostream>
#include <sstream>

#include "cfo/cli/run_config.hpp"
#include "cfo/error.hpp"
#include "cfo/io.hpp"
#include "cfo/test_cases.hpp"

namespace cfo::cli {

namespace {

namespace fs = std::filesystem;

std::string family_name(const MeshFamily& family) {
  return family.kind == MeshFamily::Kind::kPerturbed ? "perturbed" : "uniform";
}

std::string g17(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::string g3(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.3g", v);
  return buf;
}

void run_converge(const RunConfig& cfg, std::ostream& out) {
  const ProblemSpec spec = test_case(cfg.case_id);
  const ConvergenceTable table =
      convergence_study(spec, cfg.mesh, cfg.levels, cfg.relative);
  out << "case " << cfg.case_id << " (" << spec.name << "), "
      << family_name(cfg.mesh) << " meshes\n";
  print_convergence_table(out, table);
  double worst = 0.0;
  for (const ConvergenceRow& row : table.rows()) {
    worst = std::max(worst, row.max_conservation_defect /
                                row.conservation_tolerance);
  }
  out << "max conservation defect / tolerance: " << g3(worst) << '\n';
  if (cfg.formats.csv) {
    const fs::path path = cfg.output_dir / ("converge_case" +
                                            std::to_string(cfg.case_id) + "_" +
                                            family_name(cfg.mesh) + ".csv");
    write_file(path, [&](std::ostream& f) { write_convergence_csv(f, table); });
    out << "wrote " << path.string() << '\n';
  }
}

void run_solve(const RunConfig& cfg, std::ostream& out) {
  const ProblemSpec spec = test_case(cfg.case_id);
  const Mesh mesh = cfg.mesh.build(spec.domain, cfg.n);
  const CfoSolution sol = solve_cfo(mesh, spec);
  const ErrorReport r = error_report(mesh, spec, sol);
  out << "case " << cfg.case_id << " (" << spec.name << "), n = " << cfg.n
      << ", " << sol.dofs.size() << " unknowns\n"
      << "  L2 " << g3(r.l2) << "  H1 " << g3(r.h1) << "  J2^1/2 "
      << g3(r.residual) << "  flux " << g3(r.flux) << "  lambda "
      << g3(r.lambda) << '\n';
  const std::string stem = "solve_case" + std::to_string(cfg.case_id) + "_" +
                           family_name(cfg.mesh) + "_n" +
                           std::to_string(cfg.n);
  if (cfg.formats.vtk) {
    const fs::path path = cfg.output_dir / (stem + ".vtk");
    write_file(path, [&](std::ostream& f) { write_vtk_solution(f, mesh, sol); });
    out << "wrote " << path.string() << '\n';
  }
  if (cfg.formats.csv) {
    const fs::path path = cfg.output_dir / (stem + "_q.csv");
    write_file(path,
               [&](std::ostream& f) { write_edge_flux_csv(f, mesh, sol.q); });
    out << "wrote " << path.string() << '\n';
  }
}

void run_twophase(const RunConfig& cfg, std::ostream& out) {
  const TwoPhaseConfig& tp = cfg.twophase;
  const Mesh mesh = build_uniform({{0.0, 0.0}, {1.0, 1.0}}, tp.n);
  const SimulationResult result = run_simulation(mesh, tp);
  const std::string stem =
      std::string("twophase_") +
      (tp.permeability == PermeabilityKind::kUnit ? "unit" : "heterogeneous") +
      "_n" + std::to_string(tp.n);

  for (std::size_t k = 0; k < result.snapshots.size(); ++k) {
    const SaturationState& snap = result.snapshots[k];
    char index[16];
    std::snprintf(index, sizeof index, "_%04zu", k);
    if (cfg.formats.vtk) {
      write_file(cfg.output_dir / (stem + index + ".vtk"), [&](std::ostream& f) {
        write_vtk_saturation(f, mesh, snap);
      });
    }
    if (cfg.formats.csv) {
      write_file(cfg.output_dir / (stem + index + "_flux.csv"),
                 [&](std::ostream& f) { write_edge_flux_csv(f, mesh, snap.v); });
    }
  }
  if (cfg.formats.csv) {
    write_file(cfg.output_dir / (stem + "_steps.csv"), [&](std::ostream& f) {
      f << "step,inflow,outflow,mass_change,balance_residual,min_s,max_s\n";
      for (std::size_t k = 0; k < result.steps.size(); ++k) {
        const TransportDiagnostics& d = result.steps[k];
        f << k + 1 << ',' << g17(d.inflow) << ',' << g17(d.outflow) << ','
          << g17(d.mass_change) << ',' << g17(d.balance_residual) << ','
          << g17(d.min_s) << ',' << g17(d.max_s) << '\n';
      }
    });
  }

  double worst_balance = 0.0;
  for (const TransportDiagnostics& d : result.steps) {
    worst_balance = std::max(worst_balance, d.balance_residual);
  }
  out << result.steps.size() << " transport steps, "
      << result.snapshots.size() << " snapshots in "
      << cfg.output_dir.string() << '\n'
      << "max relative mass balance residual " << g3(worst_balance) << '\n';
}

void run_dumpmesh(const RunConfig& cfg, std::ostream& out) {
  const Mesh mesh = cfg.mesh.build({{0.0, 0.0}, {1.0, 1.0}}, cfg.n);
  const fs::path path = cfg.output_dir / ("mesh_" + family_name(cfg.mesh) +
                                          "_n" + std::to_string(cfg.n) + ".vtk");
  write_file(path, [&](std::ostream& f) { write_vtk_mesh(f, mesh); });
  out << mesh.num_elements() << " triangles, " << mesh.num_nodes()
      << " nodes, " << mesh.num_edges() << " edges\nwrote " << path.string()
      << '\n';
}

}  // namespace

void run(const RunConfig& config, std::ostream& out) {
  std::error_code ec;
  fs::create_directories(config.output_dir, ec);
  if (ec) {
    throw IoError("cannot create output directory " +
                  config.output_dir.string() + ": " + ec.message());
  }
  switch (config.command) {
    case Command::kConverge:
      run_converge(config, out);
      break;
    case Command::kSolve:
      run_solve(config, out);
      break;
    case Command::kTwoPhase:
      run_twophase(config, out);
      break;
    case Command::kDumpMesh:
      run_dumpmesh(config, out);
      break;
  }
}

Failure classify(const std::exception& e) {
  if (dynamic_cast<const ConfigError*>(&e)) return {2, "config"};
  if (dynamic_cast<const MeshError*>(&e)) return {3, "mesh"};
  if (dynamic_cast<const AssemblyError*>(&e)) return {4, "assembly"};
  if (dynamic_cast<const SolverError*>(&e)) return {5, "solve"};
  if (dynamic_cast<const TransportError*>(&e)) return {6, "transport"};
  if (dynamic_cast<const IoError*>(&e)) return {7, "io"};
  return {1, "internal"};
}

int main_entry(const std::vector<std::string>& args, std::ostream& out,
               std::ostream& err) {
  try {
    run(parse_config(args), out);
    return 0;
  } catch (const HelpRequested& help) {
    out << help.text();
    return 0;
  } catch (const std::exception& e) {
    const Failure f = classify(e);
    std::string message = e.what();
    std::replace(message.begin(), message.end(), '\n', ' ');
    err << "error[" << f.kind << "]: " << message << '\n';
    return f.exit_code;
  }
}

}  // namespace cfo::cli
