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

#ifndef CFO_CLI_RUN_CONFIG_HPP_
#define CFO_CLI_RUN_CONFIG_HPP_

#include <filesystem>
#include <iosfwd>
#include <stdexcept>
#include <string>
#include <vector>

#include "cfo/analysis.hpp"
#include "cfo/twophase.hpp"

namespace cfo::cli {

enum class Command { kConverge, kSolve, kTwoPhase, kDumpMesh };

struct OutputFormats {
  bool csv = true;
  bool vtk = true;
};

struct RunConfig {
  Command command = Command::kConverge;
  int case_id = 1;
  MeshFamily mesh;
  std::vector<int> levels;  // converge
  int n = 32;               // solve, dumpmesh
  bool relative = false;
  TwoPhaseConfig twophase;
  std::filesystem::path output_dir;
  OutputFormats formats;
};

// Thrown by parse_config for --help; carries the usage text.
class HelpRequested : public std::runtime_error {
 public:
  explicit HelpRequested(std::string text);
  const std::string& text() const { return text_; }

 private:
  std::string text_;
};

// Builds a RunConfig from the command line (argv[0] is skipped). A
// `--config file.json` document supplies defaults that explicit flags
// override; its keys are
//   command, case, mesh, seed, magnitude, levels, n, relative, dt, t_end,
//   pressure_update_interval, output_times, permeability, output_dir, formats
// and anything else is rejected. The output directory defaults to
// $CFO_OUTPUT_DIR, then to the working directory. Throws ConfigError.
RunConfig parse_config(const std::vector<std::string>& args);

// Executes the command, writing files under config.output_dir and the
// human-readable summary to `out`. Throws the library error types.
void run(const RunConfig& config, std::ostream& out);

// Exit status for an exception thrown by parse_config or run, and the
// failure class used in diagnostics.
struct Failure {
  int exit_code;
  const char* kind;
};
Failure classify(const std::exception& e);

// Full front end: parses, runs, prints "error[kind]: message" to `err` on
// failure and returns the exit status.
int main_entry(const std::vector<std::string>& args, std::ostream& out,
               std::ostream& err);

std::string command_name(Command c);

}  // namespace cfo::cli

#endif  // CFO_CLI_RUN_CONFIG_HPP_
