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

#include <cstdio>
#include <exception>
#include <string>

#include "CLI11.hpp"
#include "seabal/scenario.hpp"

namespace {

using seabal::RunMetrics;

void print_metrics(const RunMetrics& m) {
  std::printf("scenario        %s\n", m.scenario.c_str());
  std::printf("verdict         %s\n", seabal::to_string(m.verdict).c_str());
  std::printf("com err rms/max %.4g / %.4g m\n", m.com_err_rms, m.com_err_max);
  std::printf("joint err final %.4g rad (max %.4g)\n", m.joint_err_final,
              m.joint_err_max);
  if (m.max_motor_torque > 0.0)
    std::printf("max |tau_m|     %.4g N m\n", m.max_motor_torque);
  if (m.settling_time >= 0.0)
    std::printf("settling time   %.3f s\n", m.settling_time);
  std::printf("quat norm err   %.3g, contact drift %.3g\n",
              m.max_quat_norm_error, m.max_contact_drift);
  std::printf("wall time       %.2f s\n", m.wall_seconds);
  if (!m.note.empty()) std::printf("note            %s\n", m.note.c_str());
}

int cmd_run(const std::string& config_path, const std::string& out_dir,
            uint64_t seed) {
  const seabal::ScenarioConfig config =
      seabal::load_scenario_config(config_path);
  const seabal::ScenarioResult result = seabal::run_scenario(config, seed);
  if (!out_dir.empty()) {
    seabal::write_scenario_outputs(result, out_dir);
    std::printf("wrote %s/{trajectory.csv,columns.txt,metrics.json,*.svg}\n",
                out_dir.c_str());
  }
  print_metrics(result.metrics);
  if (!result.setup.expected_verdict.empty()) {
    std::printf("expected        %s -> %s\n",
                result.setup.expected_verdict.c_str(),
                result.metrics.expected_match ? "match" : "MISMATCH");
    return result.metrics.expected_match ? 0 : 1;
  }
  return 0;
}

int cmd_sweep(const std::string& config_path, const std::string& out_dir,
              int workers, uint64_t seed) {
  const seabal::ScenarioConfig config =
      seabal::load_scenario_config(config_path);
  const seabal::SweepResult result = seabal::run_sweep(config, workers, seed);
  if (!out_dir.empty()) {
    seabal::write_sweep_outputs(result, config, out_dir);
    std::printf("wrote %s/{sweep.csv,sweep.svg}\n", out_dir.c_str());
  }
  const std::string param = config.get("sweep.parameter", "?");
  bool ok = true;
  for (const seabal::SweepCell& cell : result.cells) {
    if (!cell.error.empty()) {
      std::printf("%s = %s: ERROR %s\n", param.c_str(),
                  cell.overrides.at(param).c_str(), cell.error.c_str());
      ok = false;
      continue;
    }
    std::printf("%s = %s: %s (com err max %.4g m)\n", param.c_str(),
                cell.overrides.at(param).c_str(),
                seabal::to_string(cell.metrics.verdict).c_str(),
                cell.metrics.com_err_max);
    if (!cell.metrics.expected_match) ok = false;
  }
  if (result.last_converged >= 0)
    std::printf("last converged cell: #%d\n", result.last_converged);
  if (result.first_diverged >= 0)
    std::printf("first diverged cell: #%d\n", result.first_diverged);
  return ok ? 0 : 1;
}

int cmd_plot(const std::string& csv_path, const std::string& out_dir) {
  const seabal::CsvTable table = seabal::read_csv(csv_path);
  seabal::write_plots_from_csv(table, out_dir.empty() ? "." : out_dir);
  std::printf("%zu rows, %zu columns -> plots in %s\n", table.rows.size(),
              table.columns.size(), out_dir.empty() ? "." : out_dir.c_str());
  return 0;
}

int cmd_validate(const std::string& config_path, uint64_t seed) {
  const seabal::ScenarioConfig config =
      seabal::load_scenario_config(config_path);
  const seabal::ScenarioSetup setup = seabal::build_scenario(config, seed);
  const seabal::RobotModel& model = setup.plant.model;
  std::printf("config          %s\n", config.name.c_str());
  std::printf("model           %zu links, %d joints, %d contacts, %.2f kg\n",
              model.links.size(), model.joint_count(), model.contact_count(),
              model.total_mass);
  std::printf("actuation       %d elastic of %d joints\n",
              setup.plant.actuation.elastic_count(), model.joint_count());
  std::printf("controller      %s\n", setup.controller_kind.c_str());
  std::printf("integrator      %s, horizon %.2f s\n",
              setup.sim.method == seabal::SimConfig::Method::FixedRK4
                  ? "fixed_rk4"
                  : "adaptive_rk45",
              setup.sim.horizon);
  if (!setup.expected_verdict.empty())
    std::printf("expects         %s\n", setup.expected_verdict.c_str());
  std::printf("ok\n");
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"momentum-based balance control simulator"};
  app.require_subcommand(1);

  std::string config_path, out_dir, csv_path;
  int workers = 1;
  uint64_t seed = 0;

  CLI::App* run = app.add_subcommand("run", "run one scenario");
  run->add_option("--config", config_path, "scenario config file")->required();
  run->add_option("--out", out_dir, "output directory");
  run->add_option("--seed", seed, "seed for generated assets");

  CLI::App* sweep = app.add_subcommand("sweep", "run a parameter sweep");
  sweep->add_option("--config", config_path, "scenario config file")->required();
  sweep->add_option("--out", out_dir, "output directory");
  sweep->add_option("--workers", workers, "worker threads");
  sweep->add_option("--seed", seed, "seed for generated assets");

  CLI::App* plot = app.add_subcommand("plot", "re-plot a trajectory csv");
  plot->add_option("csv", csv_path, "trajectory.csv path")->required();
  plot->add_option("--out", out_dir, "output directory");

  CLI::App* validate =
      app.add_subcommand("validate", "load and check a config + model");
  validate->add_option("--config", config_path, "scenario config file")
      ->required();
  validate->add_option("--seed", seed, "seed for generated assets");

  CLI11_PARSE(app, argc, argv);

  try {
    if (run->parsed()) return cmd_run(config_path, out_dir, seed);
    if (sweep->parsed()) return cmd_sweep(config_path, out_dir, workers, seed);
    if (plot->parsed()) return cmd_plot(csv_path, out_dir);
    if (validate->parsed()) return cmd_validate(config_path, seed);
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 2;
  }
  return 2;
}
