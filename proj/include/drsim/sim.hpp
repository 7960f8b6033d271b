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

#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <unordered_set>
#include <vector>

#include "drsim/channel.hpp"
#include "drsim/geometry.hpp"
#include "drsim/ris_config.hpp"
#include "drsim/rl.hpp"
#include "drsim/rng.hpp"
#include "drsim/trajectory.hpp"

namespace drsim {

// Two-lane highway segment: lane 0 runs along +y at x = x_min, lane 1 along
// -y at x = x_max. Roadside units sit on the median line.
struct WorldConfig {
  double x_min = 0.0;
  double x_max = 500.0;
  double y_min = 0.0;
  double y_max = 5000.0;
  double z_min = 50.0;
  double z_max = 600.0;
  double vehicle_speed_mps = 10.0;
  double vehicle_height_min_m = 1.5;
  double vehicle_height_max_m = 2.0;
  double lambda_arrival_per_s = 0.2;   // per lane
  double lambda_v2v_per_step = 0.05;   // communication events per step
  double lambda_v2i_per_step = 0.02;
  double rsu_x_m = 250.0;
  double rsu_first_y_m = 500.0;
  double rsu_spacing_m = 1000.0;
  double rsu_height_m = 10.0;
};

struct Vehicle {
  int id = 0;
  int lane = 0;
  double y = 0.0;
  double height_m = 1.75;  // body height; the antenna sits on the roof
};

struct Rsu {
  int id = 0;
  Vec3 position;
};

enum class PairKind : std::uint8_t { v2v, v2i };

// A communicating pair. node_a transmits; node_b is a vehicle for v2v and a
// roadside unit for v2i. Pairs deactivate when a vehicle endpoint leaves the
// segment and never reactivate.
struct V2XPair {
  int id = 0;
  PairKind kind = PairKind::v2v;
  int node_a = 0;
  int node_b = 0;
  bool active = true;
};

// Vehicle traffic, event arrivals, and pair bookkeeping. All randomness comes
// from the traffic stream passed in; draw order is fixed (lane 0 arrivals,
// lane 1 arrivals, v2v events, v2i events).
class World {
 public:
  World(const WorldConfig& cfg, Rng& traffic);

  void advance_vehicles(double dt);
  void spawn(double dt, Rng& traffic);

  // v2v partner eligibility radius (same-lane y separation).
  void set_pair_filter_threshold(double meters) { pair_filter_threshold_m_ = meters; }

  const std::vector<Vehicle>& vehicles() const { return vehicles_; }
  const std::vector<Rsu>& rsus() const { return rsus_; }
  const std::vector<V2XPair>& pairs() const { return pairs_; }

  const V2XPair* pair_by_id(int id) const;
  Vec3 vehicle_position(const Vehicle& v) const;
  Vec3 node_a_position(const V2XPair& p) const;
  Vec3 node_b_position(const V2XPair& p) const;

  // Same-lane vehicles strictly between the endpoints of a v2v pair.
  std::vector<Blocker> blockers_between(const V2XPair& p) const;

  std::vector<PairSnapshot> active_pair_snapshots() const;

 private:
  const Vehicle* vehicle_by_id(int id) const;
  bool busy(int vehicle_id) const { return busy_.count(vehicle_id) > 0; }
  void deactivate_pairs_of(int vehicle_id);

  WorldConfig cfg_;
  std::vector<Vehicle> vehicles_;
  std::vector<Rsu> rsus_;
  std::vector<V2XPair> pairs_;
  std::unordered_set<int> busy_;
  double pair_filter_threshold_m_ = 1000.0;
  double next_arrival_[2] = {0.0, 0.0};
  int next_vehicle_id_ = 0;
  int next_pair_id_ = 0;
};

struct DrsConfig {
  double speed_mps = 15.0;
  double max_yaw_rate_rad_s = 0.349;
  double step_s = 0.5;
  Pose initial{{250.0, 2500.0, 50.0}, 0.0};
};

struct RunParams {
  std::uint64_t steps = 200000;
  std::uint64_t seed = 1;
  bool log_steps = true;
};

struct MetricsConfig {
  std::vector<double> distance_bucket_edges_m = {0.0, 100.0, 250.0, 500.0};
  std::vector<int> length_bucket_edges = {1, 50, 150, 400};
};

struct SurfaceConfig {
  Vec3 node_a{0.0, 2300.0, 1.75};
  Vec3 node_b{500.0, 2700.0, 1.75};
  PairKind kind = PairKind::v2v;
  double z = 500.0;
  double yaw = 0.0;
  double x0 = 0.0, x1 = 500.0;
  int nx = 101;
  double y0 = 2000.0, y1 = 3000.0;
  int ny = 101;
  bool orientation_optimal = false;  // evaluate with the array factor at its maximum
  bool combined = false;             // fold in the (cell-independent) direct link
  double pl_cap_db = kPathLossCapDb;
};

struct SimConfig {
  WorldConfig world;
  RisConfig ris;
  LinkBudget link;
  DirectChannelConfig direct;
  TrajectoryConfig trajectory;
  AgentConfig agent;
  DrsConfig drs;
  RunParams run;
  MetricsConfig metrics;
  SurfaceConfig surface;
  std::string kernel_backend = "auto";
};

struct StepRecord {
  std::uint64_t step = 0;   // global step index
  std::uint32_t cycle = 0;  // position within the episode
  Pose drs;                 // pose after this step's motion and rotation
  Vec3 node_a, node_b;
  double xy_separation_m = 0.0;
  double d1_m = 0.0, d2_m = 0.0;
  double ris_pl_db = 0.0, direct_pl_db = 0.0, eff_pl_db = 0.0;
  double reward = 0.0;
  double rate_direct_bps = 0.0, rate_combined_bps = 0.0;
  bool near_field = false;
  ActionId action = 0;
  StateIndex state;
};

struct EpisodeRecord {
  int episode_index = 0;
  int pair_id = 0;
  PairKind kind = PairKind::v2v;
  std::uint64_t start_step = 0;
  std::uint32_t length = 0;
  double cum_reward = 0.0;
  std::vector<StepRecord> steps;  // empty when step recording is off
};

// Motion-constraint audit accumulated over a run; tolerance 1e-9 on every
// bound. A violation inside run() also raises std::runtime_error.
struct AuditReport {
  std::uint64_t steps = 0;
  double displacement_bound_m = 0.0;
  double rotation_bound_rad = 0.0;
  double max_displacement_m = 0.0;
  double max_rotation_rad = 0.0;
  std::uint64_t displacement_violations = 0;
  std::uint64_t rotation_violations = 0;
  std::uint64_t box_violations = 0;
  std::uint64_t total_violations() const {
    return displacement_violations + rotation_violations + box_violations;
  }
};

struct RunResult {
  std::vector<EpisodeRecord> episodes;
  AuditReport audit;
  QTables tables;
  std::uint64_t total_steps = 0;
  std::uint64_t serving_steps = 0;
  std::uint64_t idle_steps = 0;
  std::uint64_t near_field_steps = 0;
};

struct RunOptions {
  bool learning = true;
  std::optional<double> epsilon_override;  // e.g. 0 for greedy evaluation, 1 for random
  const QTables* initial_tables = nullptr;
  bool record_steps = true;
  bool audit_throw = true;  // raise on a constraint violation instead of only counting
};

// Executes the full serving loop for run.steps steps and returns the episode
// history, audit, and the (possibly updated) tables.
RunResult run(const SimConfig& cfg, const RunOptions& opt = {});

// ---------------- path-loss surface ----------------

struct SurfaceResult {
  std::vector<double> xs, ys;
  std::vector<double> pl_db;  // ny rows by nx cols, index = iy*nx + ix
  std::vector<std::uint8_t> near_field;
  bool combined = false;
  double direct_pl_db = 0.0;  // meaningful when combined
  double min_pl_db = 0.0, max_pl_db = 0.0;
  int min_ix = 0, min_iy = 0;
};

// Reflected-link (or combined) path loss over an xy grid at fixed altitude
// and yaw. Near-field cells carry the cap and a flag. Grid evaluation goes
// through the dispatched kernels except in orientation-optimal mode.
SurfaceResult pathloss_surface(const SurfaceConfig& cfg, const RisConfig& ris,
                               const DirectChannelConfig& direct);

// ---------------- aggregation ----------------

struct PerCycleRow {
  int len_lo = 0;
  int len_hi = 0;  // -1 for the open-ended last bucket
  std::uint32_t cycle = 0;
  std::uint64_t episodes = 0;
  double mean_reward = 0.0;
  double mean_ris_pl_db = 0.0;
  double mean_eff_pl_db = 0.0;
};

struct DistanceBucketRow {
  double lo_m = 0.0, hi_m = 0.0;
  std::uint64_t samples = 0;
  double mean_rate_direct_bps = 0.0;
  double mean_rate_combined_bps = 0.0;
  double mean_improvement_bps = 0.0;
  double mean_improvement_pct = 0.0;
};

struct RunSummary {
  std::uint64_t total_steps = 0, serving_steps = 0, idle_steps = 0;
  std::uint64_t near_field_steps = 0;
  std::uint64_t episodes = 0;
  double mean_episode_length = 0.0;
  double mean_cum_reward = 0.0;
  double first_decile_mean_cum_reward = 0.0;
  double last_decile_mean_cum_reward = 0.0;
  double mean_ris_pl_db = 0.0;  // over serving steps
  double mean_eff_pl_db = 0.0;
  std::uint64_t q_updates = 0;
  std::uint64_t q_states = 0;
};

struct MetricsReport {
  RunSummary summary;
  std::vector<PerCycleRow> per_cycle;
  std::vector<DistanceBucketRow> distance_buckets;
};

// Requires per-step records (run with record_steps = true) for the per-cycle
// and distance tables; the summary works either way.
MetricsReport aggregate_metrics(const RunResult& result, const MetricsConfig& cfg);

}  // namespace drsim
