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

#include <cstdlib>
#include <fstream>
#include <optional>
#include <sstream>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "cfo/cli/run_config.hpp"
#include "cfo/error.hpp"
#include "cfo/test_cases.hpp"

namespace cfo::cli {

namespace {

using nlohmann::json;

// Every setting, unset until a config file or a flag provides it.
struct RawConfig {
  std::optional<std::string> command;
  std::optional<int> case_id;
  std::optional<std::string> mesh;
  std::optional<std::uint64_t> seed;
  std::optional<double> magnitude;
  std::optional<std::vector<int>> levels;
  std::optional<int> n;
  std::optional<bool> relative;
  std::optional<double> dt;
  std::optional<double> t_end;
  std::optional<int> pressure_update_interval;
  std::optional<std::vector<double>> output_times;
  std::optional<std::string> permeability;
  std::optional<std::string> output_dir;
  std::optional<std::vector<std::string>> formats;
};

template <typename T>
void overlay(std::optional<T>& base, const std::optional<T>& top) {
  if (top) base = top;
}

RawConfig merge(RawConfig base, const RawConfig& top) {
  overlay(base.command, top.command);
  overlay(base.case_id, top.case_id);
  overlay(base.mesh, top.mesh);
  overlay(base.seed, top.seed);
  overlay(base.magnitude, top.magnitude);
  overlay(base.levels, top.levels);
  overlay(base.n, top.n);
  overlay(base.relative, top.relative);
  overlay(base.dt, top.dt);
  overlay(base.t_end, top.t_end);
  overlay(base.pressure_update_interval, top.pressure_update_interval);
  overlay(base.output_times, top.output_times);
  overlay(base.permeability, top.permeability);
  overlay(base.output_dir, top.output_dir);
  overlay(base.formats, top.formats);
  return base;
}

template <typename T>
T json_value(const json& doc, const std::string& key) {
  try {
    return doc.at(key).get<T>();
  } catch (const json::exception& e) {
    throw ConfigError("config key '" + key + "' has the wrong type");
  }
}

RawConfig read_config_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot read config file " + path);
  std::stringstream text;
  text << in.rdbuf();
  RawConfig raw;
  if (text.str().find_first_not_of(" \t\r\n") == std::string::npos) return raw;

  json doc;
  try {
    doc = json::parse(text.str());
  } catch (const json::parse_error& e) {
    throw ConfigError("malformed config file " + path + ": " + e.what());
  }
  if (!doc.is_object()) {
    throw ConfigError("config file " + path + " must hold a JSON object");
  }
  for (const auto& [key, value] : doc.items()) {
    if (key == "command") {
      raw.command = json_value<std::string>(doc, key);
    } else if (key == "case") {
      raw.case_id = json_value<int>(doc, key);
    } else if (key == "mesh") {
      raw.mesh = json_value<std::string>(doc, key);
    } else if (key == "seed") {
      raw.seed = json_value<std::uint64_t>(doc, key);
    } else if (key == "magnitude") {
      raw.magnitude = json_value<double>(doc, key);
    } else if (key == "levels") {
      raw.levels = json_value<std::vector<int>>(doc, key);
    } else if (key == "n") {
      raw.n = json_value<int>(doc, key);
    } else if (key == "relative") {
      raw.relative = json_value<bool>(doc, key);
    } else if (key == "dt") {
      raw.dt = json_value<double>(doc, key);
    } else if (key == "t_end") {
      raw.t_end = json_value<double>(doc, key);
    } else if (key == "pressure_update_interval") {
      raw.pressure_update_interval = json_value<int>(doc, key);
    } else if (key == "output_times") {
      raw.output_times = json_value<std::vector<double>>(doc, key);
    } else if (key == "permeability") {
      raw.permeability = json_value<std::string>(doc, key);
    } else if (key == "output_dir") {
      raw.output_dir = json_value<std::string>(doc, key);
    } else if (key == "formats") {
      raw.formats = json_value<std::vector<std::string>>(doc, key);
    } else {
      throw ConfigError("unknown config key '" + key + "'");
    }
  }
  return raw;
}

template <typename T>
std::vector<T> split_list(const std::string& text, const char* what) {
  std::vector<T> out;
  std::stringstream in(text);
  std::string item;
  while (std::getline(in, item, ',')) {
    std::stringstream cell(item);
    T value;
    if (!(cell >> value) || !(cell >> std::ws).eof()) {
      throw ConfigError(std::string("bad ") + what + " list '" + text + "'");
    }
    out.push_back(value);
  }
  if (out.empty()) throw ConfigError(std::string("empty ") + what + " list");
  return out;
}

template <typename T>
std::optional<T> flag(const CLI::Option* opt, const T& value) {
  return opt->count() > 0 ? std::optional<T>(value) : std::nullopt;
}

Command to_command(const std::string& name) {
  if (name == "converge") return Command::kConverge;
  if (name == "solve") return Command::kSolve;
  if (name == "twophase") return Command::kTwoPhase;
  if (name == "dumpmesh") return Command::kDumpMesh;
  throw ConfigError("unknown command '" + name +
                    "' (expected converge, solve, twophase or dumpmesh)");
}

void reject(bool present, const std::string& what, Command c) {
  if (present) {
    throw ConfigError("option " + what + " cannot be used with the " +
                      command_name(c) + " command");
  }
}

RunConfig resolve(const RawConfig& raw) {
  if (!raw.command) throw ConfigError("no command given");
  RunConfig cfg;
  cfg.command = to_command(*raw.command);
  const Command c = cfg.command;
  const bool is_twophase = c == Command::kTwoPhase;

  reject(raw.levels && c != Command::kConverge, "levels", c);
  reject(raw.n && c == Command::kConverge, "n (use levels)", c);
  reject(raw.relative && c != Command::kConverge, "relative", c);
  reject(raw.case_id && (is_twophase || c == Command::kDumpMesh), "case", c);
  reject(!is_twophase && (raw.dt || raw.t_end || raw.pressure_update_interval ||
                          raw.output_times || raw.permeability),
         "two-phase parameters", c);

  if (raw.case_id) {
    test_case(*raw.case_id);  // validates the id
    cfg.case_id = *raw.case_id;
  }

  const std::string mesh = raw.mesh.value_or("uniform");
  if (mesh == "uniform") {
    if (raw.seed || raw.magnitude) {
      throw ConfigError("seed and magnitude require --mesh perturbed");
    }
    cfg.mesh.kind = MeshFamily::Kind::kUniform;
  } else if (mesh == "perturbed") {
    if (is_twophase) {
      throw ConfigError("twophase runs on the uniform mesh only");
    }
    cfg.mesh.kind = MeshFamily::Kind::kPerturbed;
    cfg.mesh.magnitude = raw.magnitude.value_or(0.2);
    cfg.mesh.seed = raw.seed.value_or(1);
    if (!(cfg.mesh.magnitude >= 0.0 && cfg.mesh.magnitude <= 0.3)) {
      throw ConfigError("perturbation magnitude must lie in [0, 0.3]");
    }
  } else {
    throw ConfigError("unknown mesh family '" + mesh +
                      "' (expected uniform or perturbed)");
  }

  if (c == Command::kConverge) {
    cfg.levels = raw.levels.value_or(std::vector<int>{2, 4, 8, 16, 32, 64});
    if (cfg.levels.empty()) throw ConfigError("levels must not be empty");
    for (std::size_t i = 0; i < cfg.levels.size(); ++i) {
      if (cfg.levels[i] < 1) throw ConfigError("levels must be positive");
      if (i > 0 && cfg.levels[i] != 2 * cfg.levels[i - 1]) {
        throw ConfigError("levels must double strictly (" +
                          std::to_string(cfg.levels[i - 1]) + " then " +
                          std::to_string(cfg.levels[i]) + ")");
      }
    }
    cfg.relative = raw.relative.value_or(false);
  }

  const int default_n = is_twophase ? 64 : 32;
  cfg.n = raw.n.value_or(default_n);
  if (cfg.n < 1) throw ConfigError("n must be positive");

  if (is_twophase) {
    cfg.twophase.n = cfg.n;
    cfg.twophase.dt = raw.dt.value_or(cfg.twophase.dt);
    cfg.twophase.t_end = raw.t_end.value_or(cfg.twophase.t_end);
    cfg.twophase.pressure_update_interval =
        raw.pressure_update_interval.value_or(1);
    cfg.twophase.output_times = raw.output_times.value_or(std::vector<double>{});
    const std::string perm = raw.permeability.value_or("heterogeneous");
    if (perm == "heterogeneous") {
      cfg.twophase.permeability = PermeabilityKind::kHeterogeneous;
    } else if (perm == "unit") {
      cfg.twophase.permeability = PermeabilityKind::kUnit;
    } else {
      throw ConfigError("unknown permeability '" + perm +
                        "' (expected heterogeneous or unit)");
    }
    cfg.twophase.validate();
  }

  if (raw.output_dir) {
    cfg.output_dir = *raw.output_dir;
  } else if (const char* env = std::getenv("CFO_OUTPUT_DIR"); env && *env) {
    cfg.output_dir = env;
  } else {
    cfg.output_dir = ".";
  }

  if (raw.formats) {
    cfg.formats = {false, false};
    for (const std::string& f : *raw.formats) {
      if (f == "csv") {
        cfg.formats.csv = true;
      } else if (f == "vtk") {
        cfg.formats.vtk = true;
      } else {
        throw ConfigError("unknown output format '" + f +
                          "' (expected csv or vtk)");
      }
    }
  }
  return cfg;
}

}  // namespace

std::string command_name(Command c) {
  switch (c) {
    case Command::kConverge:
      return "converge";
    case Command::kSolve:
      return "solve";
    case Command::kTwoPhase:
      return "twophase";
    case Command::kDumpMesh:
      return "dumpmesh";
  }
  return "?";
}

HelpRequested::HelpRequested(std::string text)
    : std::runtime_error("help requested"), text_(std::move(text)) {}

RunConfig parse_config(const std::vector<std::string>& args) {
  CLI::App app{"Conservative flux optimization finite element solver", "cfo"};
  std::string command, config_path, mesh, levels, output_times, permeability,
      output_dir, formats;
  int case_id = 0, n = 0, interval = 0;
  std::uint64_t seed = 0;
  double magnitude = 0.0, dt = 0.0, t_end = 0.0;

  auto* o_cmd = app.add_option("command", command,
                               "converge | solve | twophase | dumpmesh");
  auto* o_cfg = app.add_option("--config", config_path, "flat JSON config file");
  auto* o_case = app.add_option("--case", case_id, "test case id 1..5");
  auto* o_mesh = app.add_option("--mesh", mesh, "uniform | perturbed");
  auto* o_seed = app.add_option("--seed", seed, "perturbed mesh seed");
  auto* o_mag = app.add_option("--magnitude", magnitude,
                               "perturbation magnitude in [0, 0.3]");
  auto* o_levels = app.add_option("--levels", levels,
                                  "comma separated, strictly doubling n list");
  auto* o_n = app.add_option("--n", n, "subdivisions per side");
  auto* o_rel = app.add_flag("--relative", "report relative errors");
  auto* o_dt = app.add_option("--dt", dt, "two-phase time step");
  auto* o_tend = app.add_option("--t-end", t_end, "two-phase final time");
  auto* o_int = app.add_option("--pressure-interval", interval,
                               "transport steps between pressure solves");
  auto* o_times = app.add_option("--output-times", output_times,
                                 "comma separated snapshot times");
  auto* o_perm = app.add_option("--permeability", permeability,
                                "heterogeneous | unit");
  auto* o_out = app.add_option("--output-dir", output_dir, "output directory");
  auto* o_fmt = app.add_option("--formats", formats, "comma list of csv, vtk");

  std::vector<std::string> argv(args.begin() + (args.empty() ? 0 : 1),
                                args.end());
  std::reverse(argv.begin(), argv.end());
  try {
    app.parse(argv);
  } catch (const CLI::CallForHelp&) {
    throw HelpRequested(app.help());
  } catch (const CLI::ParseError& e) {
    throw ConfigError(e.what());
  }

  RawConfig flags;
  flags.command = flag(o_cmd, command);
  flags.case_id = flag(o_case, case_id);
  flags.mesh = flag(o_mesh, mesh);
  flags.seed = flag(o_seed, seed);
  flags.magnitude = flag(o_mag, magnitude);
  if (o_levels->count()) flags.levels = split_list<int>(levels, "levels");
  flags.n = flag(o_n, n);
  if (o_rel->count()) flags.relative = true;
  flags.dt = flag(o_dt, dt);
  flags.t_end = flag(o_tend, t_end);
  flags.pressure_update_interval = flag(o_int, interval);
  if (o_times->count()) {
    flags.output_times = split_list<double>(output_times, "output times");
  }
  flags.permeability = flag(o_perm, permeability);
  flags.output_dir = flag(o_out, output_dir);
  if (o_fmt->count()) flags.formats = split_list<std::string>(formats, "formats");

  RawConfig raw;
  if (o_cfg->count()) raw = read_config_file(config_path);
  return resolve(merge(raw, flags));
}

}  // namespace cfo::cli
