// Copyright 2026 The seabal Authors
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

#ifndef SEABAL_SCENARIO_HPP_
#define SEABAL_SCENARIO_HPP_

#include <map>
#include <string>
#include <vector>

#include "seabal/sim.hpp"

namespace seabal {

enum class Verdict { Converged, Bounded, Diverged };
std::string to_string(Verdict v);

// Flat `key = value` configuration with dotted keys.  The raw map is kept so
// sweeps can rewrite single entries and re-interpret.
struct ScenarioConfig {
  std::string name;
  std::map<std::string, std::string> raw;
  std::string source_dir;  // for resolving relative model paths

  bool has(const std::string& key) const;
  std::string get(const std::string& key, const std::string& fallback) const;
  double get_num(const std::string& key, double fallback) const;
  int get_int(const std::string& key, int fallback) const;
  bool get_bool(const std::string& key, bool fallback) const;
  std::vector<double> get_list(const std::string& key) const;
};

ScenarioConfig parse_scenario_config(const std::string& text,
                                     const std::string& origin);
ScenarioConfig load_scenario_config(const std::string& path);

// Everything run_scenario instantiates from a config; exposed so tests can
// poke at the assembled pieces.
struct ScenarioSetup {
  Plant plant;
  SimState initial;
  SimConfig sim;
  ControllerGains gains;
  References refs;
  ContactConstraintSpec constraints;
  SeaParams controller_estimates;
  std::string controller_kind;  // rigid | elastic | rigid_on_elastic
  bool direct_joint_injection = false;
  std::string expected_verdict;  // empty = none declared
  double converged_joint_tol = 1e-3;   // rad, final-window joint error
  double converged_com_tol = 5e-3;     // m, final-window CoM error
  uint64_t seed = 0;
};

ScenarioSetup build_scenario(const ScenarioConfig& config, uint64_t seed = 0);

struct RunMetrics {
  std::string scenario;
  Verdict verdict = Verdict::Bounded;
  bool expected_match = true;   // false iff config declared a different verdict
  double com_err_rms = 0.0;     // m, against the CoM reference
  double com_err_max = 0.0;
  double joint_err_final = 0.0; // |s - s_d| at the last sample, rad
  double joint_err_max = 0.0;
  double momentum_err_rms = 0.0;
  double max_motor_torque = 0.0;        // N m, |tau_m|_inf over the run
  double settling_time = -1.0;          // motor-velocity tracking, s; -1 = n/a
  double max_quat_norm_error = 0.0;
  double max_contact_drift = 0.0;
  double wall_seconds = 0.0;
  std::string note;
};

struct ScenarioResult {
  Trajectory trajectory;
  RunMetrics metrics;
  ScenarioSetup setup;
};

ScenarioResult run_scenario(const ScenarioConfig& config, uint64_t seed = 0);

// Writes trajectory.csv (versioned header), columns.txt (per-column
// description), metrics.json, and the scenario's plots into out_dir.
void write_scenario_outputs(const ScenarioResult& result,
                            const std::string& out_dir);

struct SweepCell {
  std::map<std::string, std::string> overrides;
  RunMetrics metrics;
  std::string error;  // nonempty if the cell failed outright
};

struct SweepResult {
  std::vector<SweepCell> cells;
  // Index into cells of the last Converged / first Diverged along the primary
  // axis, -1 when absent.
  int last_converged = -1;
  int first_diverged = -1;
};

// Sweep driven by config keys sweep.parameter / sweep.values (optionally
// sweep.parameter2 / sweep.values2 for a grid); cells run on `workers`
// threads.  Each cell rewrites the raw map and re-builds the scenario.
SweepResult run_sweep(const ScenarioConfig& config, int workers,
                      uint64_t seed = 0);

void write_sweep_outputs(const SweepResult& result, const ScenarioConfig& config,
                         const std::string& out_dir);

// Metrics evaluation, exposed for tests.
RunMetrics evaluate_metrics(const Trajectory& traj, const ScenarioSetup& setup,
                            const std::string& name);

// Trajectory CSV round-trip support for the plot verb.
struct CsvTable {
  std::vector<std::string> columns;
  std::vector<std::vector<double>> rows;
};
CsvTable read_csv(const std::string& path);

void write_plots_from_csv(const CsvTable& table, const std::string& out_dir);

}  // namespace seabal

#endif  // SEABAL_SCENARIO_HPP_
