// SPDX-License-Identifier: Apache-2.0
//
// drsim - drone relay station assisted V2X link simulator
// Copyright (C) 2026 drsim contributors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
// http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.
// ------------------------------------------------------------------------

#include "drsim/config.hpp"

#include <algorithm>
#include <fstream>
#include <sstream>

namespace drsim {

namespace {

ConfigJson vec3_json(const Vec3& v) { return ConfigJson{{"x", v.x}, {"y", v.y}, {"z", v.z}}; }

Vec3 vec3_from(const ConfigJson& j) {
  return Vec3{j.at("x").get<double>(), j.at("y").get<double>(), j.at("z").get<double>()};
}

std::string kind_name(PairKind k) { return k == PairKind::v2v ? "v2v" : "v2i"; }

PairKind kind_from(const std::string& s) {
  if (s == "v2v") return PairKind::v2v;
  if (s == "v2i") return PairKind::v2i;
  throw config_error("surface.kind must be \"v2v\" or \"v2i\", got \"" + s + "\"");
}

}  // namespace

ConfigJson default_config_json() { return config_to_json(SimConfig{}); }

ConfigJson config_to_json(const SimConfig& c) {
  ConfigJson j;
  j["world"] = {{"x_min", c.world.x_min},
                {"x_max", c.world.x_max},
                {"y_min", c.world.y_min},
                {"y_max", c.world.y_max},
                {"z_min", c.world.z_min},
                {"z_max", c.world.z_max},
                {"vehicle_speed_mps", c.world.vehicle_speed_mps},
                {"vehicle_height_min_m", c.world.vehicle_height_min_m},
                {"vehicle_height_max_m", c.world.vehicle_height_max_m},
                {"lambda_arrival_per_s", c.world.lambda_arrival_per_s},
                {"lambda_v2v_per_step", c.world.lambda_v2v_per_step},
                {"lambda_v2i_per_step", c.world.lambda_v2i_per_step},
                {"rsu_x_m", c.world.rsu_x_m},
                {"rsu_first_y_m", c.world.rsu_first_y_m},
                {"rsu_spacing_m", c.world.rsu_spacing_m},
                {"rsu_height_m", c.world.rsu_height_m}};
  j["drs"] = {{"speed_mps", c.drs.speed_mps},
              {"max_yaw_rate_rad_s", c.drs.max_yaw_rate_rad_s},
              {"step_s", c.drs.step_s},
              {"initial",
               {{"x", c.drs.initial.position.x},
                {"y", c.drs.initial.position.y},
                {"z", c.drs.initial.position.z},
                {"yaw", c.drs.initial.yaw}}}};
  j["ris"] = {{"rows", c.ris.rows},
              {"cols", c.ris.cols},
              {"dx_m", c.ris.dx_m},
              {"dy_m", c.ris.dy_m},
              {"reflect_amp", c.ris.reflect_amp},
              {"gain_tx_dbi", c.ris.gain_tx_dbi},
              {"gain_rx_dbi", c.ris.gain_rx_dbi},
              {"gain_cell_dbi", c.ris.gain_cell_dbi},
              {"carrier_hz", c.ris.carrier_hz}};
  j["link"] = {{"tx_power_dbm", c.link.tx_power_dbm},
               {"noise_dbm", c.link.noise_dbm},
               {"eta", c.link.eta},
               {"eff_bandwidth_hz", c.link.eff_bandwidth_hz}};
  j["channel"] = {{"pl_cap_db", c.direct.pl_cap_db},
                  {"lateral_halfwidth_m", c.direct.lateral_halfwidth_m},
                  {"nlosv_mu_base_db", c.direct.nlosv_mu_base_db},
                  {"nlosv_mu_slope", c.direct.nlosv_mu_slope},
                  {"nlosv_mu_offset_db", c.direct.nlosv_mu_offset_db},
                  {"nlosv_sigma_db", c.direct.nlosv_sigma_db}};
  j["trajectory"] = {{"pair_xy_threshold_m", c.trajectory.pair_xy_threshold_m},
                     {"full_distance_objective", c.trajectory.full_distance_objective},
                     {"height_tol_m", c.trajectory.height_tol_m}};
  j["agent"] = {{"epsilon", c.agent.epsilon},
                {"discount", c.agent.discount},
                {"c_theta", c.agent.c_theta},
                {"c_phi", c.agent.c_phi},
                {"allow_hold", c.agent.allow_hold},
                {"single_estimator", c.agent.single_estimator}};
  j["run"] = {{"steps", c.run.steps}, {"seed", c.run.seed}, {"log_steps", c.run.log_steps}};
  j["kernels"] = {{"backend", c.kernel_backend}};
  j["metrics"] = {{"distance_bucket_edges_m", c.metrics.distance_bucket_edges_m},
                  {"length_bucket_edges", c.metrics.length_bucket_edges}};
  j["surface"] = {{"node_a", vec3_json(c.surface.node_a)},
                  {"node_b", vec3_json(c.surface.node_b)},
                  {"kind", kind_name(c.surface.kind)},
                  {"z", c.surface.z},
                  {"yaw", c.surface.yaw},
                  {"x0", c.surface.x0},
                  {"x1", c.surface.x1},
                  {"nx", c.surface.nx},
                  {"y0", c.surface.y0},
                  {"y1", c.surface.y1},
                  {"ny", c.surface.ny},
                  {"orientation_optimal", c.surface.orientation_optimal},
                  {"combined", c.surface.combined}};
  return j;
}

SimConfig config_from_json(const ConfigJson& doc) {
  SimConfig c;
  try {
    const auto& w = doc.at("world");
    c.world.x_min = w.at("x_min").get<double>();
    c.world.x_max = w.at("x_max").get<double>();
    c.world.y_min = w.at("y_min").get<double>();
    c.world.y_max = w.at("y_max").get<double>();
    c.world.z_min = w.at("z_min").get<double>();
    c.world.z_max = w.at("z_max").get<double>();
    c.world.vehicle_speed_mps = w.at("vehicle_speed_mps").get<double>();
    c.world.vehicle_height_min_m = w.at("vehicle_height_min_m").get<double>();
    c.world.vehicle_height_max_m = w.at("vehicle_height_max_m").get<double>();
    c.world.lambda_arrival_per_s = w.at("lambda_arrival_per_s").get<double>();
    c.world.lambda_v2v_per_step = w.at("lambda_v2v_per_step").get<double>();
    c.world.lambda_v2i_per_step = w.at("lambda_v2i_per_step").get<double>();
    c.world.rsu_x_m = w.at("rsu_x_m").get<double>();
    c.world.rsu_first_y_m = w.at("rsu_first_y_m").get<double>();
    c.world.rsu_spacing_m = w.at("rsu_spacing_m").get<double>();
    c.world.rsu_height_m = w.at("rsu_height_m").get<double>();

    const auto& d = doc.at("drs");
    c.drs.speed_mps = d.at("speed_mps").get<double>();
    c.drs.max_yaw_rate_rad_s = d.at("max_yaw_rate_rad_s").get<double>();
    c.drs.step_s = d.at("step_s").get<double>();
    const auto& ini = d.at("initial");
    c.drs.initial.position =
        Vec3{ini.at("x").get<double>(), ini.at("y").get<double>(), ini.at("z").get<double>()};
    c.drs.initial.yaw = ini.at("yaw").get<double>();

    const auto& r = doc.at("ris");
    c.ris.rows = r.at("rows").get<int>();
    c.ris.cols = r.at("cols").get<int>();
    c.ris.dx_m = r.at("dx_m").get<double>();
    c.ris.dy_m = r.at("dy_m").get<double>();
    c.ris.reflect_amp = r.at("reflect_amp").get<double>();
    c.ris.gain_tx_dbi = r.at("gain_tx_dbi").get<double>();
    c.ris.gain_rx_dbi = r.at("gain_rx_dbi").get<double>();
    c.ris.gain_cell_dbi = r.at("gain_cell_dbi").get<double>();
    c.ris.carrier_hz = r.at("carrier_hz").get<double>();

    const auto& l = doc.at("link");
    c.link.tx_power_dbm = l.at("tx_power_dbm").get<double>();
    c.link.noise_dbm = l.at("noise_dbm").get<double>();
    c.link.eta = l.at("eta").get<double>();
    c.link.eff_bandwidth_hz = l.at("eff_bandwidth_hz").get<double>();

    const auto& ch = doc.at("channel");
    c.direct.pl_cap_db = ch.at("pl_cap_db").get<double>();
    c.direct.lateral_halfwidth_m = ch.at("lateral_halfwidth_m").get<double>();
    c.direct.nlosv_mu_base_db = ch.at("nlosv_mu_base_db").get<double>();
    c.direct.nlosv_mu_slope = ch.at("nlosv_mu_slope").get<double>();
    c.direct.nlosv_mu_offset_db = ch.at("nlosv_mu_offset_db").get<double>();
    c.direct.nlosv_sigma_db = ch.at("nlosv_sigma_db").get<double>();
    c.direct.carrier_hz = c.ris.carrier_hz;  // one carrier for every link

    const auto& t = doc.at("trajectory");
    c.trajectory.pair_xy_threshold_m = t.at("pair_xy_threshold_m").get<double>();
    c.trajectory.full_distance_objective = t.at("full_distance_objective").get<bool>();
    c.trajectory.height_tol_m = t.at("height_tol_m").get<double>();
    c.trajectory.z_min_m = c.world.z_min;  // flight band comes from the world box
    c.trajectory.z_max_m = c.world.z_max;
    c.trajectory.drone_speed_mps = c.drs.speed_mps;
    c.trajectory.step_s = c.drs.step_s;

    const auto& a = doc.at("agent");
    c.agent.epsilon = a.at("epsilon").get<double>();
    c.agent.discount = a.at("discount").get<double>();
    c.agent.c_theta = a.at("c_theta").get<int>();
    c.agent.c_phi = a.at("c_phi").get<int>();
    c.agent.allow_hold = a.at("allow_hold").get<bool>();
    c.agent.single_estimator = a.at("single_estimator").get<bool>();
    c.agent.max_yaw_rate_rad_s = c.drs.max_yaw_rate_rad_s;
    c.agent.step_s = c.drs.step_s;

    const auto& run = doc.at("run");
    c.run.steps = run.at("steps").get<std::uint64_t>();
    c.run.seed = run.at("seed").get<std::uint64_t>();
    c.run.log_steps = run.at("log_steps").get<bool>();

    c.kernel_backend = doc.at("kernels").at("backend").get<std::string>();

    const auto& m = doc.at("metrics");
    c.metrics.distance_bucket_edges_m = m.at("distance_bucket_edges_m").get<std::vector<double>>();
    c.metrics.length_bucket_edges = m.at("length_bucket_edges").get<std::vector<int>>();

    const auto& s = doc.at("surface");
    c.surface.node_a = vec3_from(s.at("node_a"));
    c.surface.node_b = vec3_from(s.at("node_b"));
    c.surface.kind = kind_from(s.at("kind").get<std::string>());
    c.surface.z = s.at("z").get<double>();
    c.surface.yaw = s.at("yaw").get<double>();
    c.surface.x0 = s.at("x0").get<double>();
    c.surface.x1 = s.at("x1").get<double>();
    c.surface.nx = s.at("nx").get<int>();
    c.surface.y0 = s.at("y0").get<double>();
    c.surface.y1 = s.at("y1").get<double>();
    c.surface.ny = s.at("ny").get<int>();
    c.surface.orientation_optimal = s.at("orientation_optimal").get<bool>();
    c.surface.combined = s.at("combined").get<bool>();
    c.surface.pl_cap_db = c.direct.pl_cap_db;
  } catch (const nlohmann::json::exception& e) {
    throw config_error(std::string("malformed config: ") + e.what());
  }
  validate_config(c);
  return c;
}

void validate_config(const SimConfig& c) {
  auto fail = [](const std::string& msg) { throw config_error(msg); };

  if (!(c.world.x_min < c.world.x_max)) fail("world: x_min must be < x_max");
  if (!(c.world.y_min < c.world.y_max)) fail("world: y_min must be < y_max");
  if (!(c.world.z_min <= c.world.z_max)) fail("world: z_min must be <= z_max");
  if (c.world.vehicle_speed_mps < 0.0) fail("world.vehicle_speed_mps must be >= 0");
  if (c.world.lambda_arrival_per_s < 0.0 || c.world.lambda_v2v_per_step < 0.0 ||
      c.world.lambda_v2i_per_step < 0.0) {
    fail("world: arrival/event rates must be >= 0");
  }
  if (!(c.world.vehicle_height_min_m >= 0.0 &&
        c.world.vehicle_height_min_m <= c.world.vehicle_height_max_m)) {
    fail("world: vehicle height range invalid");
  }
  if (c.world.rsu_spacing_m <= 0.0) fail("world.rsu_spacing_m must be > 0");

  if (c.drs.speed_mps < 0.0) fail("drs.speed_mps must be >= 0");
  if (c.drs.max_yaw_rate_rad_s < 0.0) fail("drs.max_yaw_rate_rad_s must be >= 0");
  if (c.drs.step_s <= 0.0) fail("drs.step_s must be > 0");
  const Vec3& p0 = c.drs.initial.position;
  if (p0.x < c.world.x_min || p0.x > c.world.x_max || p0.y < c.world.y_min ||
      p0.y > c.world.y_max || p0.z < c.world.z_min || p0.z > c.world.z_max) {
    fail("drs.initial must lie inside the world box");
  }

  if (c.ris.rows < 1 || c.ris.cols < 1) fail("ris: rows and cols must be >= 1");
  if (c.ris.dx_m <= 0.0 || c.ris.dy_m <= 0.0) fail("ris: cell spacing must be > 0");
  if (!(c.ris.reflect_amp > 0.0 && c.ris.reflect_amp <= 1.0)) {
    fail("ris.reflect_amp must be in (0, 1]");
  }
  if (c.ris.carrier_hz <= 0.0) fail("ris.carrier_hz must be > 0");

  if (c.link.eta <= 0.0 || c.link.eta > 1.0) fail("link.eta must be in (0, 1]");
  if (c.link.eff_bandwidth_hz <= 0.0) fail("link.eff_bandwidth_hz must be > 0");

  if (c.direct.pl_cap_db <= 0.0) fail("channel.pl_cap_db must be > 0");
  if (c.direct.lateral_halfwidth_m < 0.0) fail("channel.lateral_halfwidth_m must be >= 0");
  if (c.direct.nlosv_sigma_db < 0.0) fail("channel.nlosv_sigma_db must be >= 0");

  if (c.trajectory.pair_xy_threshold_m < 0.0) fail("trajectory.pair_xy_threshold_m must be >= 0");
  if (c.trajectory.height_tol_m <= 0.0) fail("trajectory.height_tol_m must be > 0");

  if (!(c.agent.epsilon >= 0.0 && c.agent.epsilon <= 1.0)) fail("agent.epsilon must be in [0, 1]");
  if (!(c.agent.discount >= 0.0 && c.agent.discount < 1.0)) {
    fail("agent.discount must be in [0, 1)");
  }
  if (c.agent.c_theta < 1 || c.agent.c_theta > 65535 || c.agent.c_phi < 1 ||
      c.agent.c_phi > 65535) {
    fail("agent: c_theta and c_phi must be in [1, 65535]");
  }

  if (c.kernel_backend != "auto" && c.kernel_backend != "scalar" && c.kernel_backend != "avx2") {
    fail("kernels.backend must be one of \"auto\", \"scalar\", \"avx2\"");
  }

  const auto& de = c.metrics.distance_bucket_edges_m;
  if (de.size() < 2 || !std::is_sorted(de.begin(), de.end())) {
    fail("metrics.distance_bucket_edges_m must be sorted with at least two entries");
  }
  const auto& le = c.metrics.length_bucket_edges;
  if (le.size() < 2 || !std::is_sorted(le.begin(), le.end())) {
    fail("metrics.length_bucket_edges must be sorted with at least two entries");
  }

  if (c.surface.nx < 1 || c.surface.ny < 1) fail("surface: nx and ny must be >= 1");
  if (c.surface.x0 < c.world.x_min - 1e-9 || c.surface.x1 > c.world.x_max + 1e-9 ||
      c.surface.y0 < c.world.y_min - 1e-9 || c.surface.y1 > c.world.y_max + 1e-9 ||
      c.surface.z < c.world.z_min - 1e-9 || c.surface.z > c.world.z_max + 1e-9) {
    fail("surface grid must lie inside the world box");
  }
}

void merge_config(ConfigJson& dst, const ConfigJson& src, const std::string& path) {
  if (!src.is_object()) throw config_error("config root must be a JSON object");
  for (const auto& [key, val] : src.items()) {
    const std::string full = path.empty() ? key : path + "." + key;
    if (!dst.contains(key)) throw config_error("unknown config key: " + full);
    ConfigJson& d = dst[key];
    if (d.is_object() && val.is_object()) {
      merge_config(d, val, full);
    } else if (d.is_object() != val.is_object()) {
      throw config_error("type mismatch at " + full +
                         (d.is_object() ? " (expected an object)" : " (unexpected object)"));
    } else {
      d = val;
    }
  }
}

void set_config_value(ConfigJson& doc, const std::string& dotted_key, const ConfigJson& value) {
  std::vector<std::string> segs;
  std::stringstream ss(dotted_key);
  for (std::string part; std::getline(ss, part, '.');) {
    if (part.empty()) throw config_error("bad config key: " + dotted_key);
    segs.push_back(part);
  }
  if (segs.empty()) throw config_error("bad config key: " + dotted_key);

  ConfigJson* cur = &doc;
  for (std::size_t i = 0; i + 1 < segs.size(); ++i) {
    if (!cur->is_object() || !cur->contains(segs[i])) {
      throw config_error("unknown config key: " + dotted_key);
    }
    cur = &(*cur)[segs[i]];
  }
  if (!cur->is_object() || !cur->contains(segs.back())) {
    throw config_error("unknown config key: " + dotted_key);
  }
  (*cur)[segs.back()] = value;
}

void apply_override(ConfigJson& doc, const std::string& spec) {
  const auto eq = spec.find('=');
  if (eq == std::string::npos || eq == 0) {
    throw config_error("--set expects key=value, got \"" + spec + "\"");
  }
  const std::string key = spec.substr(0, eq);
  const std::string raw = spec.substr(eq + 1);

  ConfigJson parsed = ConfigJson::parse(raw, nullptr, false);
  if (parsed.is_discarded()) parsed = raw;  // unquoted strings like v2i or avx2
  set_config_value(doc, key, parsed);
}

ConfigJson load_config_doc(const std::string& path, const std::vector<std::string>& overrides,
                           std::optional<std::uint64_t> seed, std::optional<std::uint64_t> steps) {
  ConfigJson doc = default_config_json();
  if (!path.empty()) {
    std::ifstream in(path);
    if (!in) throw config_error("cannot open config file: " + path);
    ConfigJson file;
    try {
      file = ConfigJson::parse(in);
    } catch (const nlohmann::json::exception& e) {
      throw config_error("cannot parse " + path + ": " + e.what());
    }
    // A manifest from an earlier run is accepted directly; its embedded
    // resolved config reproduces that run.
    if (file.is_object() && file.contains("manifest_version")) {
      if (file.at("manifest_version") != 1) {
        throw config_error("unsupported manifest_version in " + path);
      }
      if (!file.contains("config")) throw config_error("manifest missing config: " + path);
      file = file.at("config");
    }
    merge_config(doc, file);
  }
  for (const auto& s : overrides) apply_override(doc, s);
  if (seed) doc["run"]["seed"] = *seed;
  if (steps) doc["run"]["steps"] = *steps;
  return doc;
}

SimConfig load_config(const std::string& path, const std::vector<std::string>& overrides,
                      std::optional<std::uint64_t> seed, std::optional<std::uint64_t> steps) {
  return config_from_json(load_config_doc(path, overrides, seed, steps));
}

}  // namespace drsim
