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

#include "seabal/scenario.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <memory>
#include <sstream>
#include <thread>
#include <utility>

#include "seabal/plot.hpp"

namespace seabal {
namespace {

namespace fs = std::filesystem;

std::string trim(const std::string& s) {
  size_t a = s.find_first_not_of(" \t\r\n");
  if (a == std::string::npos) return "";
  size_t b = s.find_last_not_of(" \t\r\n");
  return s.substr(a, b - a + 1);
}

std::string lower(std::string s) {
  for (char& c : s) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  return s;
}

std::vector<std::string> split_ws(const std::string& s) {
  std::vector<std::string> out;
  std::istringstream in(s);
  std::string tok;
  while (in >> tok) {
    // Allow comma separators too.
    std::string cur;
    for (char c : tok) {
      if (c == ',') {
        if (!cur.empty()) out.push_back(cur);
        cur.clear();
      } else {
        cur += c;
      }
    }
    if (!cur.empty()) out.push_back(cur);
  }
  return out;
}

std::string fmt17(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::string json_escape(const std::string& s) {
  std::string out;
  for (char c : s) {
    switch (c) {
      case '"': out += "\\\""; break;
      case '\\': out += "\\\\"; break;
      case '\n': out += "\\n"; break;
      case '\t': out += "\\t"; break;
      default:
        if (static_cast<unsigned char>(c) < 0x20) {
          char buf[8];
          std::snprintf(buf, sizeof buf, "\\u%04x", c);
          out += buf;
        } else {
          out += c;
        }
    }
  }
  return out;
}

std::string resolve_path(const ScenarioConfig& config, const std::string& p) {
  if (fs::path(p).is_absolute()) return p;
  if (!config.source_dir.empty()) {
    const fs::path cand = fs::path(config.source_dir) / p;
    if (fs::exists(cand)) return cand.string();
  }
  if (fs::exists(p)) return p;
#ifdef SEABAL_DATA_DIR
  {
    const fs::path cand = fs::path(SEABAL_DATA_DIR) / p;
    if (fs::exists(cand)) return cand.string();
  }
#endif
  return config.source_dir.empty() ? p
                                   : (fs::path(config.source_dir) / p).string();
}

Vec3 get_vec3(const ScenarioConfig& config, const std::string& key,
              const Vec3& fallback) {
  if (!config.has(key)) return fallback;
  const std::vector<double> v = config.get_list(key);
  if (v.size() == 1) return Vec3(0.0, v[0], 0.0);  // scalar = lateral axis
  if (v.size() != 3)
    throw ModelError("config key '" + key + "' needs 1 or 3 numbers");
  return Vec3(v[0], v[1], v[2]);
}

struct ColumnDef {
  std::string name;
  std::string doc;
};

// One row of trajectory.csv; keep assembly and documentation side by side so
// the sidecar file cannot drift from the data.
void trajectory_columns(const ScenarioSetup& setup, std::vector<ColumnDef>* defs) {
  const RobotModel& model = setup.plant.model;
  defs->push_back({"t", "time, s"});
  for (const char* a : {"x", "y", "z"})
    defs->push_back({std::string("com_") + a, std::string("CoM position ") + a + ", m"});
  for (const char* a : {"x", "y", "z"})
    defs->push_back({std::string("com_ref_") + a,
                     std::string("CoM reference ") + a + ", m"});
  for (const char* a : {"lin_x", "lin_y", "lin_z", "ang_x", "ang_y", "ang_z"})
    defs->push_back({std::string("h_") + a,
                     std::string("centroidal momentum ") + a +
                         (a[0] == 'l' ? ", kg m/s" : ", kg m^2/s")});
  defs->push_back({"quat_norm_err", "|1 - |base quaternion||"});
  defs->push_back({"contact_drift", "worst contact pose error, m + rad"});
  for (int j = 0; j < model.joint_count(); ++j)
    defs->push_back({"s_" + model.joint_name(j),
                     "joint position " + model.joint_name(j) + ", rad"});
  for (int j = 0; j < model.joint_count(); ++j)
    defs->push_back({"s_ref_" + model.joint_name(j),
                     "desired joint position " + model.joint_name(j) + ", rad"});
  for (int j = 0; j < model.joint_count(); ++j)
    defs->push_back({"sd_" + model.joint_name(j),
                     "joint velocity " + model.joint_name(j) + ", rad/s"});
  for (int j = 0; j < model.joint_count(); ++j) {
    if (setup.plant.actuation.joints[j] != Actuation::Elastic) continue;
    const std::string jn = model.joint_name(j);
    defs->push_back({"thd_" + jn, "motor velocity " + jn + ", rad/s"});
    defs->push_back({"thd_d_" + jn, "desired motor velocity " + jn + ", rad/s"});
    defs->push_back({"tau_m_" + jn, "commanded motor torque " + jn + ", N m"});
  }
  for (const ContactFrame& c : model.contacts)
    defs->push_back({"fz_" + c.name, "normal contact force " + c.name + ", N"});
}

std::vector<double> trajectory_row(const ScenarioSetup& setup,
                                   const TrajectorySample& sample) {
  const RobotModel& model = setup.plant.model;
  const int n = model.joint_count();
  std::vector<double> row;
  row.push_back(sample.t);
  const Vec3 cref = setup.refs.com_ref(sample.t);
  for (int i = 0; i < 3; ++i) row.push_back(sample.com(i));
  for (int i = 0; i < 3; ++i) row.push_back(cref(i));
  for (int i = 0; i < 6; ++i) row.push_back(sample.momentum(i));
  row.push_back(sample.quat_norm_error);
  row.push_back(sample.contact_drift);
  const VecX sref = setup.refs.posture_ref(sample.t);
  for (int j = 0; j < n; ++j) row.push_back(sample.state.s(j));
  for (int j = 0; j < n; ++j) row.push_back(sref(j));
  for (int j = 0; j < n; ++j) row.push_back(sample.state.s_dot(j));
  int e = 0;
  for (int j = 0; j < n; ++j) {
    if (setup.plant.actuation.joints[j] != Actuation::Elastic) continue;
    row.push_back(sample.state.theta_dot(j));
    row.push_back(sample.command.theta_dot_d.size() > e
                      ? sample.command.theta_dot_d(e)
                      : 0.0);
    row.push_back(sample.command.motor_torque.size() > e
                      ? sample.command.motor_torque(e)
                      : 0.0);
    ++e;
  }
  for (size_t c = 0; c < model.contacts.size(); ++c)
    row.push_back(sample.contact_forces.size() >=
                          static_cast<int>(6 * (c + 1))
                      ? sample.contact_forces(6 * c + 2)
                      : 0.0);
  return row;
}

int find_column(const CsvTable& table, const std::string& name) {
  for (size_t i = 0; i < table.columns.size(); ++i)
    if (table.columns[i] == name) return static_cast<int>(i);
  return -1;
}

std::vector<double> column(const CsvTable& table, int idx) {
  std::vector<double> out;
  out.reserve(table.rows.size());
  for (const auto& r : table.rows) out.push_back(r[idx]);
  return out;
}

}  // namespace

std::string to_string(Verdict v) {
  switch (v) {
    case Verdict::Converged: return "converged";
    case Verdict::Bounded: return "bounded";
    case Verdict::Diverged: return "diverged";
  }
  return "bounded";
}

bool ScenarioConfig::has(const std::string& key) const {
  return raw.count(key) > 0;
}

std::string ScenarioConfig::get(const std::string& key,
                                const std::string& fallback) const {
  auto it = raw.find(key);
  return it == raw.end() ? fallback : it->second;
}

double ScenarioConfig::get_num(const std::string& key, double fallback) const {
  auto it = raw.find(key);
  if (it == raw.end()) return fallback;
  char* end = nullptr;
  const double v = std::strtod(it->second.c_str(), &end);
  if (end == it->second.c_str())
    throw ModelError("config key '" + key + "': not a number: " + it->second);
  return v;
}

int ScenarioConfig::get_int(const std::string& key, int fallback) const {
  return static_cast<int>(std::lround(get_num(key, fallback)));
}

bool ScenarioConfig::get_bool(const std::string& key, bool fallback) const {
  auto it = raw.find(key);
  if (it == raw.end()) return fallback;
  const std::string v = lower(trim(it->second));
  if (v == "true" || v == "1" || v == "yes" || v == "on") return true;
  if (v == "false" || v == "0" || v == "no" || v == "off") return false;
  throw ModelError("config key '" + key + "': not a boolean: " + it->second);
}

std::vector<double> ScenarioConfig::get_list(const std::string& key) const {
  std::vector<double> out;
  auto it = raw.find(key);
  if (it == raw.end()) return out;
  for (const std::string& tok : split_ws(it->second)) {
    char* end = nullptr;
    const double v = std::strtod(tok.c_str(), &end);
    if (end == tok.c_str() || *end != '\0')
      throw ModelError("config key '" + key + "': not a number: " + tok);
    out.push_back(v);
  }
  return out;
}

ScenarioConfig parse_scenario_config(const std::string& text,
                                     const std::string& origin) {
  ScenarioConfig config;
  std::istringstream in(text);
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const size_t hash = line.find('#');
    if (hash != std::string::npos) line = line.substr(0, hash);
    line = trim(line);
    if (line.empty()) continue;
    const size_t eq = line.find('=');
    if (eq == std::string::npos)
      throw ModelError(origin + ":" + std::to_string(lineno) +
                       ": expected 'key = value', got: " + line);
    const std::string key = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));
    if (key.empty())
      throw ModelError(origin + ":" + std::to_string(lineno) + ": empty key");
    if (config.raw.count(key))
      throw ModelError(origin + ":" + std::to_string(lineno) +
                       ": duplicate key '" + key + "'");
    config.raw[key] = value;
  }
  config.name = config.get("name", fs::path(origin).stem().string());
  return config;
}

ScenarioConfig load_scenario_config(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ModelError("cannot open config: " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  ScenarioConfig config = parse_scenario_config(ss.str(), path);
  config.source_dir = fs::path(path).parent_path().string();
  return config;
}

ScenarioSetup build_scenario(const ScenarioConfig& config, uint64_t seed) {
  ScenarioSetup setup;
  setup.seed = seed;

  const std::string model_key = config.get("model", "");
  if (model_key.empty()) throw ModelError("config: missing 'model'");
  RobotModel model = load_model(resolve_path(config, model_key));
  const int n = model.joint_count();

  // Actuation pattern: uniform keyword or one entry per joint.
  ActuationSpec spec;
  const std::string act = lower(config.get("actuation", "rigid"));
  if (act == "rigid") {
    spec = ActuationSpec::uniform(n, Actuation::Rigid);
  } else if (act == "elastic") {
    spec = ActuationSpec::uniform(n, Actuation::Elastic);
  } else {
    std::istringstream in(act);
    std::string tok;
    while (in >> tok) {
      for (char& c : tok)
        if (c == ',') c = ' ';
      for (const std::string& t : split_ws(tok)) {
        if (t == "rigid") spec.joints.push_back(Actuation::Rigid);
        else if (t == "elastic") spec.joints.push_back(Actuation::Elastic);
        else throw ModelError("config 'actuation': unknown entry '" + t + "'");
      }
    }
    if (spec.size() != n)
      throw ModelError("config 'actuation': expected " + std::to_string(n) +
                       " entries, got " + std::to_string(spec.size()));
  }

  const SeaParams plant_sea = SeaParams::uniform(
      n, config.get_num("stiffness_nm_rad", 350.0),
      config.get_num("damping_nms_rad", 0.25), config.get_num("gear_ratio", 0.01),
      config.get_num("motor_inertia_kgm2", 1e-5),
      config.get_num("motor_torque_limit_nm",
                     std::numeric_limits<double>::infinity()));
  setup.controller_estimates = SeaParams::uniform(
      n, config.get_num("ctrl_stiffness_nm_rad", plant_sea.stiffness(0)),
      config.get_num("ctrl_damping_nms_rad", plant_sea.damping(0)),
      config.get_num("ctrl_gear_ratio", plant_sea.gear_ratio(0)),
      config.get_num("ctrl_motor_inertia_kgm2", plant_sea.motor_inertia(0)),
      config.get_num("ctrl_motor_torque_limit_nm", plant_sea.tau_m_max(0)));

  setup.plant.model = std::move(model);
  setup.plant.actuation = spec;
  setup.plant.sea = plant_sea;

  // Integration settings.
  const std::string method = lower(config.get("integrator", "fixed_rk4"));
  if (method == "fixed_rk4") setup.sim.method = SimConfig::Method::FixedRK4;
  else if (method == "adaptive_rk45") setup.sim.method = SimConfig::Method::AdaptiveRK45;
  else throw ModelError("config 'integrator': unknown method '" + method + "'");
  setup.sim.dt = config.get_num("dt_s", 2e-4);
  setup.sim.horizon = config.get_num("horizon_s", 5.0);
  setup.sim.control_period = config.get_num("control_period_s", 1e-3);
  setup.sim.output_period = config.get_num("output_period_s", 1e-2);
  setup.sim.ideal_velocity = config.get_bool("ideal_velocity", false);
  setup.sim.abs_tol = config.get_num("abs_tol", 1e-8);
  setup.sim.rel_tol = config.get_num("rel_tol", 1e-6);
  // A balancing run that winds any joint beyond ~286 deg has failed, so the
  // scenario-level position guard is much tighter than the library default.
  setup.sim.guard_position = config.get_num("guard_position_rad", 5.0);
  setup.sim.guard_velocity = config.get_num("guard_velocity", 1e4);

  // Initial state: base at the world origin, contacts weld wherever the given
  // joint posture puts them.
  SimState initial = make_state(n);
  if (config.has("initial_joint_pos_rad")) {
    const std::vector<double> q = config.get_list("initial_joint_pos_rad");
    if (static_cast<int>(q.size()) != n)
      throw ModelError("config 'initial_joint_pos_rad': expected " +
                       std::to_string(n) + " numbers");
    for (int j = 0; j < n; ++j) initial.s(j) = q[j];
  }
  initial.theta = initial.s;
  if (spec.elastic_count() > 0) {
    VecX tau0, f0;
    static_equilibrium(setup.plant.model, initial, &tau0, &f0);
    initial.theta = spring_preload_theta(initial.s, tau0, plant_sea, spec);
  }
  setup.initial = initial;

  // References around the initial configuration.
  const KinematicsCache kin0 = compute_kinematics(setup.plant.model, initial);
  setup.refs.com0 = kin0.com;
  setup.refs.com_amplitude = get_vec3(config, "com_amplitude_m", Vec3::Zero());
  setup.refs.com_frequency = config.get_num("com_frequency_hz", 0.0);
  setup.refs.com_step = get_vec3(config, "com_step_m", Vec3::Zero());
  setup.refs.step_time = config.get_num("step_time_s", 0.0);
  setup.refs.s_nominal = initial.s;
  if (config.has("step_joints")) {
    const double angle = config.get_num("step_angle_rad", 0.0);
    VecX step = VecX::Zero(n);
    std::istringstream in(config.get("step_joints", ""));
    std::string jn;
    while (in >> jn) {
      const int j = setup.plant.model.joint_index(jn);
      if (j < 0) throw ModelError("config 'step_joints': unknown joint '" + jn + "'");
      step(j) = angle;
    }
    setup.refs.s_step = step;
  }

  const double kp_lin = config.get_num("gain_momentum_p_lin", 50.0);
  const double kp_ang = config.get_num("gain_momentum_p_ang", 10.0);
  const double ki_lin = config.get_num("gain_momentum_i_lin", 0.0);
  const double ki_ang = config.get_num("gain_momentum_i_ang", 0.0);
  setup.gains.momentum_p.topLeftCorner<3, 3>() = kp_lin * Mat3::Identity();
  setup.gains.momentum_p.bottomRightCorner<3, 3>() = kp_ang * Mat3::Identity();
  setup.gains.momentum_i.topLeftCorner<3, 3>() = ki_lin * Mat3::Identity();
  setup.gains.momentum_i.bottomRightCorner<3, 3>() = ki_ang * Mat3::Identity();
  setup.gains.postural_p =
      config.get_num("gain_postural_p", 50.0) * MatX::Identity(n, n);
  setup.gains.postural_d =
      config.get_num("gain_postural_d", 10.0) * MatX::Identity(n, n);
  setup.gains.motor_gain =
      VecX::Constant(n, config.get_num("gain_motor", 100.0));

  setup.constraints.friction = config.get_num("friction_coeff", 0.5);
  setup.constraints.n_edges = config.get_int("friction_edges", 4);
  setup.constraints.f_min = config.get_num("min_normal_force_n", 1.0);
  if (!setup.plant.model.contacts.empty()) {
    double hx = std::numeric_limits<double>::infinity(), hy = hx;
    for (const ContactFrame& c : setup.plant.model.contacts) {
      hx = std::min(hx, c.half_x);
      hy = std::min(hy, c.half_y);
    }
    setup.constraints.cop_x_min = -hx;
    setup.constraints.cop_x_max = hx;
    setup.constraints.cop_y_min = -hy;
    setup.constraints.cop_y_max = hy;
  }

  setup.controller_kind = lower(config.get(
      "controller", spec.elastic_count() > 0 ? "elastic" : "rigid"));
  if (setup.controller_kind != "rigid" && setup.controller_kind != "elastic" &&
      setup.controller_kind != "rigid_on_elastic")
    throw ModelError("config 'controller': unknown kind '" +
                     setup.controller_kind + "'");
  setup.direct_joint_injection = config.get_bool("direct_joint_injection", false);
  setup.expected_verdict = lower(config.get("expected_verdict", ""));
  if (!setup.expected_verdict.empty() && setup.expected_verdict != "converged" &&
      setup.expected_verdict != "bounded" && setup.expected_verdict != "diverged")
    throw ModelError("config 'expected_verdict': unknown verdict '" +
                     setup.expected_verdict + "'");
  setup.converged_joint_tol = config.get_num("converged_joint_tol_rad", 1e-3);
  setup.converged_com_tol = config.get_num("converged_com_tol_m", 5e-3);
  return setup;
}

RunMetrics evaluate_metrics(const Trajectory& traj, const ScenarioSetup& setup,
                            const std::string& name) {
  RunMetrics m;
  m.scenario = name;
  m.note = traj.note;
  const double mass = setup.plant.model.total_mass;
  const size_t count = traj.samples.size();

  double com_sq = 0.0, mom_sq = 0.0;
  for (const TrajectorySample& sample : traj.samples) {
    const double com_err =
        (sample.com - setup.refs.com_ref(sample.t)).norm();
    com_sq += com_err * com_err;
    m.com_err_max = std::max(m.com_err_max, com_err);
    const Vec6 h_err =
        sample.momentum - setup.refs.momentum_ref(mass, sample.t);
    mom_sq += h_err.squaredNorm();
    const VecX sref = setup.refs.posture_ref(sample.t);
    const double joint_err =
        (sample.state.s - sref).cwiseAbs().maxCoeff();
    m.joint_err_max = std::max(m.joint_err_max, joint_err);
    if (sample.command.motor_torque.size())
      m.max_motor_torque = std::max(
          m.max_motor_torque, sample.command.motor_torque.cwiseAbs().maxCoeff());
    m.max_quat_norm_error = std::max(m.max_quat_norm_error, sample.quat_norm_error);
    m.max_contact_drift = std::max(m.max_contact_drift, sample.contact_drift);
  }
  if (count) {
    m.com_err_rms = std::sqrt(com_sq / count);
    m.momentum_err_rms = std::sqrt(mom_sq / count);
    const TrajectorySample& last = traj.samples.back();
    m.joint_err_final =
        (last.state.s - setup.refs.posture_ref(last.t)).cwiseAbs().maxCoeff();
  }

  if (traj.diverged) {
    m.verdict = Verdict::Diverged;
  } else if (count >= 2) {
    // Converged when the final fifth of the run tracks both references.
    const size_t start = count - std::max<size_t>(1, count / 5);
    bool ok = true;
    for (size_t i = start; i < count; ++i) {
      const TrajectorySample& s = traj.samples[i];
      if ((s.state.s - setup.refs.posture_ref(s.t)).cwiseAbs().maxCoeff() >
              setup.converged_joint_tol ||
          (s.com - setup.refs.com_ref(s.t)).norm() > setup.converged_com_tol) {
        ok = false;
        break;
      }
    }
    m.verdict = ok ? Verdict::Converged : Verdict::Bounded;
  }

  // Settling time of the motor-velocity tracking loop: last time the error
  // is outside the band.
  double band_peak = 0.0;
  bool any_motor = false;
  for (const TrajectorySample& s : traj.samples) {
    if (!s.command.theta_dot_d.size()) continue;
    const VecX thd_el = setup.plant.actuation.elastic_part(s.state.theta_dot);
    if (thd_el.size() != s.command.theta_dot_d.size()) continue;
    any_motor = true;
    band_peak = std::max(
        band_peak, (thd_el - s.command.theta_dot_d).cwiseAbs().maxCoeff());
  }
  if (any_motor && !traj.diverged) {
    const double band = std::max(0.05 * band_peak, 1e-3);
    m.settling_time = 0.0;
    for (size_t i = traj.samples.size(); i-- > 0;) {
      const TrajectorySample& s = traj.samples[i];
      if (!s.command.theta_dot_d.size()) continue;
      const VecX thd_el = setup.plant.actuation.elastic_part(s.state.theta_dot);
      if ((thd_el - s.command.theta_dot_d).cwiseAbs().maxCoeff() > band) {
        m.settling_time = s.t;
        break;
      }
    }
  }

  if (!setup.expected_verdict.empty())
    m.expected_match = to_string(m.verdict) == setup.expected_verdict;
  return m;
}

ScenarioResult run_scenario(const ScenarioConfig& config, uint64_t seed) {
  ScenarioResult result;
  result.setup = build_scenario(config, seed);
  const ScenarioSetup& setup = result.setup;

  std::unique_ptr<ControllerBase> controller;
  if (setup.controller_kind == "rigid") {
    controller = std::make_unique<RigidBalanceController>(
        setup.gains, setup.refs, setup.constraints);
  } else if (setup.controller_kind == "elastic") {
    controller = std::make_unique<ElasticBalanceController>(
        setup.gains, setup.refs, setup.constraints, setup.controller_estimates,
        setup.plant.actuation);
  } else {
    controller = std::make_unique<RigidOnElasticController>(
        RigidBalanceController(setup.gains, setup.refs, setup.constraints),
        setup.plant.sea, setup.plant.actuation, setup.direct_joint_injection);
  }

  const auto t0 = std::chrono::steady_clock::now();
  result.trajectory =
      run_simulation(setup.plant, controller.get(), setup.initial, setup.sim);
  const auto t1 = std::chrono::steady_clock::now();
  result.metrics = evaluate_metrics(result.trajectory, setup, config.name);
  result.metrics.wall_seconds =
      std::chrono::duration<double>(t1 - t0).count();
  return result;
}

void write_scenario_outputs(const ScenarioResult& result,
                            const std::string& out_dir) {
  fs::create_directories(out_dir);
  std::vector<ColumnDef> defs;
  trajectory_columns(result.setup, &defs);

  CsvTable table;
  for (const ColumnDef& d : defs) table.columns.push_back(d.name);
  for (const TrajectorySample& s : result.trajectory.samples)
    table.rows.push_back(trajectory_row(result.setup, s));

  {
    std::ofstream out(fs::path(out_dir) / "trajectory.csv", std::ios::binary);
    out << "# seabal-trajectory v1\n";
    out << "# scenario: " << result.metrics.scenario << "\n";
    out << "# columns: " << table.columns.size() << " (see columns.txt)\n";
    for (size_t i = 0; i < table.columns.size(); ++i)
      out << (i ? "," : "") << table.columns[i];
    out << "\n";
    for (const auto& row : table.rows) {
      for (size_t i = 0; i < row.size(); ++i)
        out << (i ? "," : "") << fmt17(row[i]);
      out << "\n";
    }
  }
  {
    std::ofstream out(fs::path(out_dir) / "columns.txt", std::ios::binary);
    out << "trajectory.csv columns, one line per column:\n";
    for (const ColumnDef& d : defs) out << d.name << " -- " << d.doc << "\n";
  }
  {
    const RunMetrics& m = result.metrics;
    std::ofstream out(fs::path(out_dir) / "metrics.json", std::ios::binary);
    out << "{\n";
    out << "  \"scenario\": \"" << json_escape(m.scenario) << "\",\n";
    out << "  \"verdict\": \"" << to_string(m.verdict) << "\",\n";
    out << "  \"expected_match\": " << (m.expected_match ? "true" : "false")
        << ",\n";
    out << "  \"com_err_rms_m\": " << fmt17(m.com_err_rms) << ",\n";
    out << "  \"com_err_max_m\": " << fmt17(m.com_err_max) << ",\n";
    out << "  \"joint_err_final_rad\": " << fmt17(m.joint_err_final) << ",\n";
    out << "  \"joint_err_max_rad\": " << fmt17(m.joint_err_max) << ",\n";
    out << "  \"momentum_err_rms\": " << fmt17(m.momentum_err_rms) << ",\n";
    out << "  \"max_motor_torque_nm\": " << fmt17(m.max_motor_torque) << ",\n";
    out << "  \"settling_time_s\": " << fmt17(m.settling_time) << ",\n";
    out << "  \"max_quat_norm_error\": " << fmt17(m.max_quat_norm_error)
        << ",\n";
    out << "  \"max_contact_drift\": " << fmt17(m.max_contact_drift) << ",\n";
    out << "  \"wall_seconds\": " << fmt17(m.wall_seconds) << ",\n";
    out << "  \"derivative_evals\": " << result.trajectory.derivative_evals
        << ",\n";
    out << "  \"note\": \"" << json_escape(m.note) << "\"\n";
    out << "}\n";
  }
  write_plots_from_csv(table, out_dir);
}

CsvTable read_csv(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ModelError("cannot open csv: " + path);
  CsvTable table;
  std::string line;
  bool header_done = false;
  while (std::getline(in, line)) {
    line = trim(line);
    if (line.empty() || line[0] == '#') continue;
    std::vector<std::string> cells;
    std::string cur;
    for (char c : line) {
      if (c == ',') {
        cells.push_back(cur);
        cur.clear();
      } else {
        cur += c;
      }
    }
    cells.push_back(cur);
    if (!header_done) {
      for (std::string& c : cells) table.columns.push_back(trim(c));
      header_done = true;
      continue;
    }
    std::vector<double> row;
    row.reserve(cells.size());
    for (const std::string& c : cells) {
      char* end = nullptr;
      row.push_back(std::strtod(c.c_str(), &end));
    }
    if (row.size() != table.columns.size())
      throw ModelError(path + ": row with " + std::to_string(row.size()) +
                       " cells, expected " + std::to_string(table.columns.size()));
    table.rows.push_back(std::move(row));
  }
  return table;
}

void write_plots_from_csv(const CsvTable& table, const std::string& out_dir) {
  fs::create_directories(out_dir);
  const int t_idx = find_column(table, "t");
  if (t_idx < 0 || table.rows.empty()) return;
  const std::vector<double> t = column(table, t_idx);

  {
    PlotSpec spec;
    spec.title = "CoM tracking";
    spec.x_label = "t, s";
    spec.y_label = "position, m";
    for (const char* a : {"x", "y", "z"}) {
      const int ci = find_column(table, std::string("com_") + a);
      const int ri = find_column(table, std::string("com_ref_") + a);
      if (ci >= 0) spec.series.push_back({std::string("com_") + a, t, column(table, ci), "", false});
      if (ri >= 0) spec.series.push_back({std::string("ref_") + a, t, column(table, ri), "", true});
    }
    write_svg_plot((fs::path(out_dir) / "com.svg").string(), spec);
  }
  {
    PlotSpec spec;
    spec.title = "Joint tracking error";
    spec.x_label = "t, s";
    spec.y_label = "s - s_ref, rad";
    for (size_t i = 0; i < table.columns.size(); ++i) {
      const std::string& name = table.columns[i];
      if (name.rfind("s_", 0) != 0 || name.rfind("s_ref_", 0) == 0 ||
          name.rfind("sd_", 0) == 0)
        continue;
      const int ri = find_column(table, "s_ref_" + name.substr(2));
      if (ri < 0) continue;
      std::vector<double> err = column(table, static_cast<int>(i));
      const std::vector<double> ref = column(table, ri);
      for (size_t k = 0; k < err.size(); ++k) err[k] -= ref[k];
      spec.series.push_back({name.substr(2), t, err, "", false});
    }
    write_svg_plot((fs::path(out_dir) / "joint_error.svg").string(), spec);
  }
  {
    PlotSpec spec;
    spec.title = "Centroidal momentum";
    spec.x_label = "t, s";
    spec.y_label = "momentum";
    for (const char* a : {"lin_x", "lin_y", "lin_z", "ang_x", "ang_y", "ang_z"}) {
      const int ci = find_column(table, std::string("h_") + a);
      if (ci >= 0) spec.series.push_back({std::string("h_") + a, t, column(table, ci), "", false});
    }
    write_svg_plot((fs::path(out_dir) / "momentum.svg").string(), spec);
  }
  {
    PlotSpec spec;
    spec.title = "Motor velocity tracking";
    spec.x_label = "t, s";
    spec.y_label = "rad/s";
    for (size_t i = 0; i < table.columns.size(); ++i) {
      const std::string& name = table.columns[i];
      if (name.rfind("thd_", 0) != 0) continue;
      const bool desired = name.rfind("thd_d_", 0) == 0;
      spec.series.push_back(
          {name, t, column(table, static_cast<int>(i)), "", desired});
    }
    if (!spec.series.empty())
      write_svg_plot((fs::path(out_dir) / "motor.svg").string(), spec);
  }
}

SweepResult run_sweep(const ScenarioConfig& config, int workers, uint64_t seed) {
  const std::string param = config.get("sweep.parameter", "");
  if (param.empty()) throw ModelError("config: missing 'sweep.parameter'");
  const std::vector<double> values = config.get_list("sweep.values");
  if (values.empty()) throw ModelError("config: missing 'sweep.values'");
  const std::string param2 = config.get("sweep.parameter2", "");
  std::vector<double> values2 = config.get_list("sweep.values2");
  if (!param2.empty() && values2.empty())
    throw ModelError("config: 'sweep.parameter2' without 'sweep.values2'");
  // zip pairs values2 elementwise with values instead of forming a grid,
  // for parameters that must co-vary (e.g. damping scaled with stiffness).
  const bool zip = config.get_bool("sweep.zip", false);
  if (zip && values2.size() != values.size())
    throw ModelError("config: 'sweep.zip' needs equally long value lists");
  if (param2.empty()) values2 = {0.0};

  SweepResult result;
  if (zip) {
    for (size_t i = 0; i < values.size(); ++i) {
      SweepCell cell;
      cell.overrides[param] = fmt17(values[i]);
      cell.overrides[param2] = fmt17(values2[i]);
      result.cells.push_back(std::move(cell));
    }
  } else {
    for (double v : values) {
      for (double v2 : values2) {
        SweepCell cell;
        cell.overrides[param] = fmt17(v);
        if (!param2.empty()) cell.overrides[param2] = fmt17(v2);
        result.cells.push_back(std::move(cell));
      }
    }
  }

  std::atomic<size_t> next{0};
  auto worker = [&]() {
    for (;;) {
      const size_t i = next.fetch_add(1);
      if (i >= result.cells.size()) return;
      SweepCell& cell = result.cells[i];
      ScenarioConfig local = config;
      for (const auto& [k, v] : cell.overrides) local.raw[k] = v;
      local.raw.erase("sweep.parameter");
      local.raw.erase("sweep.values");
      local.raw.erase("sweep.parameter2");
      local.raw.erase("sweep.values2");
      local.raw.erase("sweep.zip");
      try {
        const ScenarioResult r = run_scenario(local, seed);
        cell.metrics = r.metrics;
      } catch (const std::exception& e) {
        cell.error = e.what();
      }
    }
  };
  const int k = std::max(1, workers);
  std::vector<std::thread> pool;
  for (int i = 1; i < k; ++i) pool.emplace_back(worker);
  worker();
  for (std::thread& th : pool) th.join();

  for (size_t i = 0; i < result.cells.size(); ++i) {
    if (!result.cells[i].error.empty()) continue;
    if (result.cells[i].metrics.verdict == Verdict::Converged)
      result.last_converged = static_cast<int>(i);
    if (result.cells[i].metrics.verdict == Verdict::Diverged &&
        result.first_diverged < 0)
      result.first_diverged = static_cast<int>(i);
  }
  return result;
}

void write_sweep_outputs(const SweepResult& result, const ScenarioConfig& config,
                         const std::string& out_dir) {
  fs::create_directories(out_dir);
  const std::string param = config.get("sweep.parameter", "parameter");
  const std::string param2 = config.get("sweep.parameter2", "");

  std::ofstream out(fs::path(out_dir) / "sweep.csv", std::ios::binary);
  out << "# seabal-sweep v1\n";
  out << "# scenario: " << config.name << "\n";
  out << "# parameter: " << param << "\n";
  if (!param2.empty()) out << "# parameter2: " << param2 << "\n";
  out << param;
  if (!param2.empty()) out << "," << param2;
  out << ",verdict,expected_match,com_err_rms_m,com_err_max_m,joint_err_final_rad,"
         "joint_err_max_rad,max_motor_torque_nm,settling_time_s,wall_seconds,error\n";
  for (const SweepCell& cell : result.cells) {
    out << cell.overrides.at(param);
    if (!param2.empty()) out << "," << cell.overrides.at(param2);
    if (!cell.error.empty()) {
      out << ",error,false,,,,,,,," << "\"" << json_escape(cell.error) << "\"\n";
      continue;
    }
    const RunMetrics& m = cell.metrics;
    out << "," << to_string(m.verdict) << ","
        << (m.expected_match ? "true" : "false") << "," << fmt17(m.com_err_rms)
        << "," << fmt17(m.com_err_max) << "," << fmt17(m.joint_err_final) << ","
        << fmt17(m.joint_err_max) << "," << fmt17(m.max_motor_torque) << ","
        << fmt17(m.settling_time) << "," << fmt17(m.wall_seconds) << ",\n";
  }
  out.close();

  PlotSpec spec;
  spec.title = "Sweep over " + param;
  spec.x_label = param;
  spec.y_label = "max CoM error, m";
  Series ok_series{"converged/bounded", {}, {}, "#1f77b4", false};
  for (const SweepCell& cell : result.cells) {
    if (!cell.error.empty()) continue;
    const double x = std::strtod(cell.overrides.at(param).c_str(), nullptr);
    if (cell.metrics.verdict == Verdict::Diverged) {
      spec.markers.push_back({x, 0.0, "diverged", "#d62728"});
    } else {
      ok_series.x.push_back(x);
      ok_series.y.push_back(cell.metrics.com_err_max);
    }
  }
  spec.series.push_back(std::move(ok_series));
  write_svg_plot((fs::path(out_dir) / "sweep.svg").string(), spec);
}

}  // namespace seabal
