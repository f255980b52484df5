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

#ifndef CFO_IO_HPP_
#define CFO_IO_HPP_

#include <filesystem>
#include <functional>
#include <iosfwd>
#include <span>

#include "cfo/assembly.hpp"
#include "cfo/mesh.hpp"
#include "cfo/twophase.hpp"

namespace cfo {

// VTK legacy ASCII unstructured grid of triangles (cell type 5). All numbers
// are written with 17 significant digits.
void write_vtk_mesh(std::ostream& out, const Mesh& mesh);

// Mesh plus POINT_DATA `u` and CELL_DATA `lambda`.
void write_vtk_solution(std::ostream& out, const Mesh& mesh,
                        const CfoSolution& sol);

// Mesh plus CELL_DATA `saturation`.
void write_vtk_saturation(std::ostream& out, const Mesh& mesh,
                          const SaturationState& state);

// edge_id,n_x,n_y,flux
void write_edge_flux_csv(std::ostream& out, const Mesh& mesh,
                         std::span<const double> flux);

// Opens `path` for writing, creating parent directories, and runs `fill`.
// Throws IoError on any failure.
void write_file(const std::filesystem::path& path,
                const std::function<void(std::ostream&)>& fill);

}  // namespace cfo

#endif  // CFO_IO_HPP_
