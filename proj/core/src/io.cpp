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

#include "cfo/io.hpp"

#include <fstream>
#include <ostream>

#include "cfo/error.hpp"

namespace cfo {

namespace {

class PrecisionGuard {
 public:
  explicit PrecisionGuard(std::ostream& out)
      : out_(out), precision_(out.precision(17)) {}
  ~PrecisionGuard() { out_.precision(precision_); }

 private:
  std::ostream& out_;
  std::streamsize precision_;
};

void write_cell_scalars(std::ostream& out, const char* name,
                        std::span<const double> values) {
  out << "SCALARS " << name << " double 1\nLOOKUP_TABLE default\n";
  for (double v : values) out << v << '\n';
}

}  // namespace

void write_vtk_mesh(std::ostream& out, const Mesh& mesh) {
  PrecisionGuard guard(out);
  out << "# vtk DataFile Version 3.0\ncfo mesh\nASCII\n"
         "DATASET UNSTRUCTURED_GRID\n";
  out << "POINTS " << mesh.num_nodes() << " double\n";
  for (const Vec2& p : mesh.nodes()) out << p.x << ' ' << p.y << " 0\n";
  out << "CELLS " << mesh.num_elements() << ' ' << 4 * mesh.num_elements()
      << '\n';
  for (int t = 0; t < mesh.num_elements(); ++t) {
    const auto& tri = mesh.triangle(t);
    out << "3 " << tri[0] << ' ' << tri[1] << ' ' << tri[2] << '\n';
  }
  out << "CELL_TYPES " << mesh.num_elements() << '\n';
  for (int t = 0; t < mesh.num_elements(); ++t) out << "5\n";
}

void write_vtk_solution(std::ostream& out, const Mesh& mesh,
                        const CfoSolution& sol) {
  write_vtk_mesh(out, mesh);
  PrecisionGuard guard(out);
  out << "POINT_DATA " << mesh.num_nodes() << '\n';
  write_cell_scalars(out, "u", sol.u);
  out << "CELL_DATA " << mesh.num_elements() << '\n';
  write_cell_scalars(out, "lambda", sol.lambda);
}

void write_vtk_saturation(std::ostream& out, const Mesh& mesh,
                          const SaturationState& state) {
  write_vtk_mesh(out, mesh);
  PrecisionGuard guard(out);
  out << "CELL_DATA " << mesh.num_elements() << '\n';
  write_cell_scalars(out, "saturation", state.S);
}

void write_edge_flux_csv(std::ostream& out, const Mesh& mesh,
                         std::span<const double> flux) {
  PrecisionGuard guard(out);
  out << "edge_id,n_x,n_y,flux\n";
  for (int e = 0; e < mesh.num_edges(); ++e) {
    const Vec2& n = mesh.edge_normal(e);
    out << e << ',' << n.x << ',' << n.y << ',' << flux[e] << '\n';
  }
}

void write_file(const std::filesystem::path& path,
                const std::function<void(std::ostream&)>& fill) {
  std::error_code ec;
  if (path.has_parent_path()) {
    std::filesystem::create_directories(path.parent_path(), ec);
    if (ec) {
      throw IoError("cannot create directory " + path.parent_path().string() +
                    ": " + ec.message());
    }
  }
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot open " + path.string() + " for writing");
  fill(out);
  out.flush();
  if (!out) throw IoError("write failed for " + path.string());
}

}  // namespace cfo
