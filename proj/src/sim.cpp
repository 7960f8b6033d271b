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

#include "drsim/sim.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>
#include <stdexcept>
#include <utility>

#include "drsim/kernels/pathloss_grid.hpp"

namespace drsim {

namespace {

constexpr double kConstraintTol = 1e-9;

void validate_world(const WorldConfig& w) {
  if (!(w.x_min < w.x_max) || !(w.y_min < w.y_max) || !(w.z_min <= w.z_max)) {
    throw std::invalid_argument("world bounds must be ordered");
  }
  if (w.vehicle_speed_mps < 0.0 || w.lambda_arrival_per_s < 0.0 ||
      w.lambda_v2v_per_step < 0.0 || w.lambda_v2i_per_step < 0.0) {
    throw std::invalid_argument("world rates and speeds must be non-negative");
  }
  if (!(w.vehicle_height_min_m <= w.vehicle_height_max_m) || w.vehicle_height_min_m < 0.0) {
    throw std::invalid_argument("vehicle height range invalid");
  }
  if (w.rsu_spacing_m <= 0.0) throw std::invalid_argument("rsu_spacing_m must be positive");
}

}  // namespace

World::World(const WorldConfig& cfg, Rng& traffic) : cfg_(cfg) {
  validate_world(cfg_);
  int rsu_id = 0;
  for (double y = cfg_.rsu_first_y_m; y <= cfg_.y_max + 1e-9; y += cfg_.rsu_spacing_m) {
    rsus_.push_back(Rsu{rsu_id++, Vec3{cfg_.rsu_x_m, y, cfg_.rsu_height_m}});
  }
  // First inter-arrival gap per lane; lane 0 drawn before lane 1.
  for (int lane = 0; lane < 2; ++lane) {
    next_arrival_[lane] = cfg_.lambda_arrival_per_s > 0.0
                              ? traffic.exponential(cfg_.lambda_arrival_per_s)
                              : std::numeric_limits<double>::infinity();
  }
}

Vec3 World::vehicle_position(const Vehicle& v) const {
  const double x = v.lane == 0 ? cfg_.x_min : cfg_.x_max;
  return Vec3{x, v.y, v.height_m};  // antenna on the roof
}

const Vehicle* World::vehicle_by_id(int id) const {
  for (const auto& v : vehicles_) {
    if (v.id == id) return &v;
  }
  return nullptr;
}

const V2XPair* World::pair_by_id(int id) const {
  for (const auto& p : pairs_) {
    if (p.id == id) return &p;
  }
  return nullptr;
}

Vec3 World::node_a_position(const V2XPair& p) const {
  const Vehicle* v = vehicle_by_id(p.node_a);
  if (!v) throw std::logic_error("pair endpoint a refers to a removed vehicle");
  return vehicle_position(*v);
}

Vec3 World::node_b_position(const V2XPair& p) const {
  if (p.kind == PairKind::v2i) return rsus_.at(static_cast<std::size_t>(p.node_b)).position;
  const Vehicle* v = vehicle_by_id(p.node_b);
  if (!v) throw std::logic_error("pair endpoint b refers to a removed vehicle");
  return vehicle_position(*v);
}

void World::deactivate_pairs_of(int vehicle_id) {
  for (auto& p : pairs_) {
    if (!p.active) continue;
    const bool hit = p.node_a == vehicle_id ||
                     (p.kind == PairKind::v2v && p.node_b == vehicle_id);
    if (hit) {
      p.active = false;
      busy_.erase(p.node_a);
      if (p.kind == PairKind::v2v) busy_.erase(p.node_b);
    }
  }
}

void World::advance_vehicles(double dt) {
  for (auto& v : vehicles_) {
    v.y += (v.lane == 0 ? 1.0 : -1.0) * cfg_.vehicle_speed_mps * dt;
  }
  for (std::size_t i = 0; i < vehicles_.size();) {
    const Vehicle& v = vehicles_[i];
    if (v.y < cfg_.y_min || v.y > cfg_.y_max) {
      deactivate_pairs_of(v.id);
      vehicles_.erase(vehicles_.begin() + static_cast<std::ptrdiff_t>(i));
    } else {
      ++i;
    }
  }
}

void World::spawn(double dt, Rng& traffic) {
  // Arrivals. Per spawned vehicle the height is drawn before the next gap.
  for (int lane = 0; lane < 2; ++lane) {
    next_arrival_[lane] -= dt;
    while (next_arrival_[lane] <= 0.0) {
      Vehicle v;
      v.id = next_vehicle_id_++;
      v.lane = lane;
      v.y = lane == 0 ? cfg_.y_min : cfg_.y_max;
      v.height_m = traffic.uniform(cfg_.vehicle_height_min_m, cfg_.vehicle_height_max_m);
      vehicles_.push_back(v);
      next_arrival_[lane] += traffic.exponential(cfg_.lambda_arrival_per_s);
    }
  }

  // v2v events: the initiator is drawn uniformly among idle vehicles, the
  // partner uniformly among idle same-lane vehicles within the pre-filter
  // distance. An event with no eligible initiator or partner is discarded.
  const std::uint64_t nv2v =
      cfg_.lambda_v2v_per_step > 0.0 ? traffic.poisson(cfg_.lambda_v2v_per_step) : 0;
  for (std::uint64_t e = 0; e < nv2v; ++e) {
    std::vector<std::size_t> idle;
    for (std::size_t i = 0; i < vehicles_.size(); ++i) {
      if (!busy(vehicles_[i].id)) idle.push_back(i);
    }
    if (idle.empty()) continue;
    const std::size_t ai = idle[traffic.uniform_index(idle.size())];
    const Vehicle& a = vehicles_[ai];
    std::vector<std::size_t> partners;
    for (std::size_t i : idle) {
      if (i == ai) continue;
      const Vehicle& b = vehicles_[i];
      if (b.lane != a.lane) continue;
      // Same lane means same x, so the xy separation is just |dy|.
      if (std::abs(b.y - a.y) <= pair_filter_threshold_m_) partners.push_back(i);
    }
    if (partners.empty()) continue;
    const std::size_t bi = partners[traffic.uniform_index(partners.size())];
    V2XPair p;
    p.id = next_pair_id_++;
    p.kind = PairKind::v2v;
    p.node_a = a.id;
    p.node_b = vehicles_[bi].id;
    pairs_.push_back(p);
    busy_.insert(p.node_a);
    busy_.insert(p.node_b);
  }

  // v2i events: uniform idle vehicle, nearest roadside unit.
  const std::uint64_t nv2i =
      cfg_.lambda_v2i_per_step > 0.0 ? traffic.poisson(cfg_.lambda_v2i_per_step) : 0;
  for (std::uint64_t e = 0; e < nv2i; ++e) {
    std::vector<std::size_t> idle;
    for (std::size_t i = 0; i < vehicles_.size(); ++i) {
      if (!busy(vehicles_[i].id)) idle.push_back(i);
    }
    if (idle.empty() || rsus_.empty()) continue;
    const std::size_t ai = idle[traffic.uniform_index(idle.size())];
    const Vehicle& a = vehicles_[ai];
    const Vec3 apos = vehicle_position(a);
    std::size_t best = 0;
    double best_d = distance(apos, rsus_[0].position);
    for (std::size_t i = 1; i < rsus_.size(); ++i) {
      const double d = distance(apos, rsus_[i].position);
      if (d < best_d) {
        best_d = d;
        best = i;
      }
    }
    V2XPair p;
    p.id = next_pair_id_++;
    p.kind = PairKind::v2i;
    p.node_a = a.id;
    p.node_b = rsus_[best].id;
    pairs_.push_back(p);
    busy_.insert(p.node_a);
  }
}

std::vector<Blocker> World::blockers_between(const V2XPair& p) const {
  std::vector<Blocker> out;
  if (p.kind != PairKind::v2v) return out;
  const Vehicle* a = vehicle_by_id(p.node_a);
  const Vehicle* b = vehicle_by_id(p.node_b);
  if (!a || !b) return out;
  const double lo = std::min(a->y, b->y);
  const double hi = std::max(a->y, b->y);
  for (const auto& v : vehicles_) {
    if (v.id == a->id || v.id == b->id) continue;
    if (v.lane != a->lane) continue;
    if (v.y > lo && v.y < hi) out.push_back(Blocker{vehicle_position(v), v.height_m});
  }
  return out;
}

std::vector<PairSnapshot> World::active_pair_snapshots() const {
  std::vector<PairSnapshot> out;
  for (const auto& p : pairs_) {
    if (!p.active) continue;
    out.push_back(PairSnapshot{p.id, node_a_position(p), node_b_position(p)});
  }
  return out;
}

// ---------------- serving loop ----------------

namespace {

struct PendingUpdate {
  StateIndex s;
  ActionId a = 0;
  double r = 0.0;
};

void audit_box(const Vec3& pos, const WorldConfig& w, AuditReport& audit, bool throw_on_fail) {
  const bool inside = pos.x >= w.x_min - kConstraintTol && pos.x <= w.x_max + kConstraintTol &&
                      pos.y >= w.y_min - kConstraintTol && pos.y <= w.y_max + kConstraintTol &&
                      pos.z >= w.z_min - kConstraintTol && pos.z <= w.z_max + kConstraintTol;
  if (!inside) {
    audit.box_violations += 1;
    if (throw_on_fail) {
      std::ostringstream os;
      os << "drs left the bounding box: (" << pos.x << ", " << pos.y << ", " << pos.z << ")";
      throw std::runtime_error(os.str());
    }
  }
}

}  // namespace

RunResult run(const SimConfig& cfg, const RunOptions& opt) {
  if (cfg.drs.step_s <= 0.0) throw std::invalid_argument("drs.step_s must be positive");
  if (cfg.drs.speed_mps < 0.0) throw std::invalid_argument("drs.speed_mps must be non-negative");

  Rng traffic = Rng::stream(cfg.run.seed, 1);
  Rng agent_rng = Rng::stream(cfg.run.seed, 2);
  Rng channel_rng = Rng::stream(cfg.run.seed, 3);

  World world(cfg.world, traffic);
  world.set_pair_filter_threshold(cfg.trajectory.pair_xy_threshold_m);

  AgentConfig acfg = cfg.agent;
  acfg.max_yaw_rate_rad_s = cfg.drs.max_yaw_rate_rad_s;
  acfg.step_s = cfg.drs.step_s;
  if (opt.epsilon_override) acfg.epsilon = *opt.epsilon_override;

  const double dt = cfg.drs.step_s;
  const double cap = cfg.direct.pl_cap_db;
  const double disp_bound = cfg.drs.speed_mps * dt;
  const double rot_bound = cfg.drs.max_yaw_rate_rad_s * dt;

  RunResult out;
  if (opt.initial_tables) out.tables = *opt.initial_tables;
  out.audit.displacement_bound_m = disp_bound;
  out.audit.rotation_bound_rad = rot_bound;

  Pose pose = cfg.drs.initial;
  audit_box(pose.position, cfg.world, out.audit, opt.audit_throw);

  int serving = -1;
  std::uint32_t cycle = 0;
  bool have_prev_pl = false;
  double pl_prev = 0.0;
  std::optional<PendingUpdate> pending;
  EpisodeRecord cur_ep;
  int episode_counter = 0;

  auto close_episode = [&]() {
    if (pending) {
      if (opt.learning) {
        update(out.tables, pending->s, pending->a, pending->r, std::nullopt, acfg, agent_rng);
      }
      pending.reset();
    }
    out.episodes.push_back(std::move(cur_ep));
    cur_ep = EpisodeRecord{};
    serving = -1;
    have_prev_pl = false;
    cycle = 0;
  };

  for (std::uint64_t step = 0; step < cfg.run.steps; ++step) {
    world.advance_vehicles(dt);
    world.spawn(dt, traffic);

    if (serving >= 0) {
      const V2XPair* p = world.pair_by_id(serving);
      if (!p || !p->active) close_episode();
    }
    if (serving < 0) {
      const auto snaps = world.active_pair_snapshots();
      if (const auto sel = select_pair(pose.position, snaps, cfg.trajectory)) {
        serving = *sel;
        cur_ep.episode_index = episode_counter++;
        cur_ep.pair_id = serving;
        cur_ep.kind = world.pair_by_id(serving)->kind;
        cur_ep.start_step = step;
      }
    }

    if (serving < 0) {
      // Idle: the drone hovers in place; the box constraint still holds.
      out.idle_steps += 1;
      audit_box(pose.position, cfg.world, out.audit, opt.audit_throw);
      out.audit.steps += 1;
      continue;
    }

    const V2XPair& pair = *world.pair_by_id(serving);
    const Vec3 a_pos = world.node_a_position(pair);
    const Vec3 b_pos = world.node_b_position(pair);
    const Pose prev_pose = pose;

    const Vec3 l_opt = optimal_location(a_pos, b_pos, cfg.trajectory);
    const Vec3 new_pos = step_towards(pose.position, l_opt, cfg.drs.speed_mps, dt);

    // Decision state: the geometry after this step's translation, before the
    // rotation the agent is about to pick.
    const AngleSet pre_angles = angles_to_pair(Pose{new_pos, pose.yaw}, a_pos, b_pos);
    const StateIndex s = quantize_state(pre_angles, acfg);

    // The previous step's transition bootstraps from this decision state.
    if (pending) {
      if (opt.learning) {
        update(out.tables, pending->s, pending->a, pending->r, s, acfg, agent_rng);
      }
      pending.reset();
    }

    const ActionId act = choose_action(s, out.tables, acfg, agent_rng);
    pose = apply_yaw_action(Pose{new_pos, pose.yaw}, act, acfg);

    const AngleSet angles = angles_to_pair(pose, a_pos, b_pos);
    const double d1 = distance(pose.position, a_pos);
    const double d2 = distance(pose.position, b_pos);

    bool near = !is_far_field(d1, d2, cfg.ris);
    double ris_pl = 0.0;
    if (near) {
      ris_pl = cap;  // the reflected link is unusable this step
      out.near_field_steps += 1;
    } else {
      ris_pl = ris_far_field_pl(d1, d2, angles, cfg.ris, cap);
    }

    double direct_pl = 0.0;
    if (pair.kind == PairKind::v2v) {
      const auto blockers = world.blockers_between(pair);
      direct_pl = v2v_direct_pl(a_pos, b_pos, blockers, cfg.direct, channel_rng);
    } else {
      direct_pl = v2i_direct_pl(a_pos, b_pos, cfg.direct);
    }
    const double eff_pl = combine_links(direct_pl, ris_pl, cap);

    // On the first serving step the reflected link comes into existence; the
    // previous path loss is the absent-link value (the cap), so establishing
    // the link earns the improvement relative to no link at all.
    const double r = reward(have_prev_pl ? pl_prev : cap, ris_pl);
    pl_prev = ris_pl;
    have_prev_pl = true;
    if (opt.learning) pending = PendingUpdate{s, act, r};

    // Constraint audit.
    const double disp = distance(pose.position, prev_pose.position);
    const double rot = yaw_rotation_angle(prev_pose.yaw, pose.yaw);
    out.audit.max_displacement_m = std::max(out.audit.max_displacement_m, disp);
    out.audit.max_rotation_rad = std::max(out.audit.max_rotation_rad, rot);
    if (disp > disp_bound + kConstraintTol) {
      out.audit.displacement_violations += 1;
      if (opt.audit_throw) throw std::runtime_error("per-step displacement bound violated");
    }
    if (rot > rot_bound + kConstraintTol) {
      out.audit.rotation_violations += 1;
      if (opt.audit_throw) throw std::runtime_error("per-step rotation bound violated");
    }
    audit_box(pose.position, cfg.world, out.audit, opt.audit_throw);
    out.audit.steps += 1;

    cur_ep.cum_reward += r;
    cur_ep.length += 1;
    out.serving_steps += 1;
    if (opt.record_steps) {
      StepRecord rec;
      rec.step = step;
      rec.cycle = cycle;
      rec.drs = pose;
      rec.node_a = a_pos;
      rec.node_b = b_pos;
      rec.xy_separation_m = xy_distance(a_pos, b_pos);
      rec.d1_m = d1;
      rec.d2_m = d2;
      rec.ris_pl_db = ris_pl;
      rec.direct_pl_db = direct_pl;
      rec.eff_pl_db = eff_pl;
      rec.reward = r;
      rec.rate_direct_bps = rate_bps(snr_db(direct_pl, cfg.link), cfg.link);
      rec.rate_combined_bps = rate_bps(snr_db(eff_pl, cfg.link), cfg.link);
      rec.near_field = near;
      rec.action = act;
      rec.state = s;
      cur_ep.steps.push_back(rec);
    }
    cycle += 1;
  }

  if (serving >= 0) close_episode();

  out.total_steps = cfg.run.steps;
  return out;
}

// ---------------- path-loss surface ----------------

namespace {

std::vector<double> linspace(double lo, double hi, int n) {
  if (n <= 0) throw std::invalid_argument("grid axis needs at least one point");
  std::vector<double> v(static_cast<std::size_t>(n));
  if (n == 1) {
    v[0] = lo;
    return v;
  }
  const double step = (hi - lo) / static_cast<double>(n - 1);
  for (int i = 0; i < n; ++i) v[static_cast<std::size_t>(i)] = lo + step * i;
  return v;
}

}  // namespace

SurfaceResult pathloss_surface(const SurfaceConfig& cfg, const RisConfig& ris,
                               const DirectChannelConfig& direct) {
  if (cfg.nx <= 0 || cfg.ny <= 0) throw std::invalid_argument("surface grid must be non-empty");

  SurfaceResult res;
  res.xs = linspace(cfg.x0, cfg.x1, cfg.nx);
  res.ys = linspace(cfg.y0, cfg.y1, cfg.ny);
  const std::size_t cells = res.xs.size() * res.ys.size();
  res.pl_db.assign(cells, 0.0);
  res.near_field.assign(cells, 0);

  if (cfg.orientation_optimal) {
    // Array factor pinned to its maximum: only distances and the element
    // patterns matter, so yaw is irrelevant here.
    for (std::size_t iy = 0; iy < res.ys.size(); ++iy) {
      for (std::size_t ix = 0; ix < res.xs.size(); ++ix) {
        const Vec3 p{res.xs[ix], res.ys[iy], cfg.z};
        const Pose pose{p, cfg.yaw};
        const double d1 = distance(p, cfg.node_a);
        const double d2 = distance(p, cfg.node_b);
        const std::size_t idx = iy * res.xs.size() + ix;
        if (!is_far_field(d1, d2, ris)) {
          res.pl_db[idx] = cfg.pl_cap_db;
          res.near_field[idx] = 1;
          continue;
        }
        const AngleSet ang = angles_to_pair(pose, cfg.node_a, cfg.node_b);
        const double ft = radiation_pattern(ang.theta_t);
        const double fr = radiation_pattern(ang.theta_r);
        res.pl_db[idx] =
            ris_far_field_pl_core(d1, d2, ft, fr, 1.0, ris, cfg.pl_cap_db);
      }
    }
  } else {
    kernels::SurfaceJob job;
    job.node_a = cfg.node_a;
    job.node_b = cfg.node_b;
    job.grid.x0 = cfg.x0;
    job.grid.dx = cfg.nx > 1 ? (cfg.x1 - cfg.x0) / (cfg.nx - 1) : 0.0;
    job.grid.nx = cfg.nx;
    job.grid.y0 = cfg.y0;
    job.grid.dy = cfg.ny > 1 ? (cfg.y1 - cfg.y0) / (cfg.ny - 1) : 0.0;
    job.grid.ny = cfg.ny;
    job.grid.z = cfg.z;
    job.grid.yaw = cfg.yaw;
    job.ris = ris;
    job.pl_cap_db = cfg.pl_cap_db;
    kernels::ris_pathloss_grid(job, res.pl_db, res.near_field);
  }

  if (cfg.combined) {
    res.combined = true;
    // No blockers on the surface pair, so the v2v draw stays line-of-sight
    // and the scratch stream is never consumed.
    Rng scratch = Rng::stream(0, 0);
    res.direct_pl_db =
        cfg.kind == PairKind::v2v
            ? v2v_direct_pl(cfg.node_a, cfg.node_b, std::span<const Blocker>{}, direct, scratch)
            : v2i_direct_pl(cfg.node_a, cfg.node_b, direct);
    for (double& v : res.pl_db) v = combine_links(res.direct_pl_db, v, cfg.pl_cap_db);
  }

  res.min_pl_db = res.pl_db[0];
  res.max_pl_db = res.pl_db[0];
  for (std::size_t iy = 0; iy < res.ys.size(); ++iy) {
    for (std::size_t ix = 0; ix < res.xs.size(); ++ix) {
      const double v = res.pl_db[iy * res.xs.size() + ix];
      if (v < res.min_pl_db) {
        res.min_pl_db = v;
        res.min_ix = static_cast<int>(ix);
        res.min_iy = static_cast<int>(iy);
      }
      if (v > res.max_pl_db) res.max_pl_db = v;
    }
  }
  return res;
}

// ---------------- aggregation ----------------

MetricsReport aggregate_metrics(const RunResult& result, const MetricsConfig& cfg) {
  MetricsReport rep;
  RunSummary& s = rep.summary;
  s.total_steps = result.total_steps;
  s.serving_steps = result.serving_steps;
  s.idle_steps = result.idle_steps;
  s.near_field_steps = result.near_field_steps;
  s.episodes = result.episodes.size();
  s.q_updates = result.tables.update_count();
  s.q_states = result.tables.state_count();

  if (!result.episodes.empty()) {
    double len_sum = 0.0, rew_sum = 0.0;
    for (const auto& ep : result.episodes) {
      len_sum += ep.length;
      rew_sum += ep.cum_reward;
    }
    const auto n = result.episodes.size();
    s.mean_episode_length = len_sum / static_cast<double>(n);
    s.mean_cum_reward = rew_sum / static_cast<double>(n);
    const std::size_t k = std::max<std::size_t>(1, n / 10);
    double first = 0.0, last = 0.0;
    for (std::size_t i = 0; i < k; ++i) first += result.episodes[i].cum_reward;
    for (std::size_t i = n - k; i < n; ++i) last += result.episodes[i].cum_reward;
    s.first_decile_mean_cum_reward = first / static_cast<double>(k);
    s.last_decile_mean_cum_reward = last / static_cast<double>(k);
  }

  double ris_sum = 0.0, eff_sum = 0.0;
  std::uint64_t nsteps = 0;
  for (const auto& ep : result.episodes) {
    for (const auto& st : ep.steps) {
      ris_sum += st.ris_pl_db;
      eff_sum += st.eff_pl_db;
      nsteps += 1;
    }
  }
  if (nsteps > 0) {
    s.mean_ris_pl_db = ris_sum / static_cast<double>(nsteps);
    s.mean_eff_pl_db = eff_sum / static_cast<double>(nsteps);
  }

  // Per-cycle averages, grouped by episode-length bucket.
  const auto& ledges = cfg.length_bucket_edges;
  if (ledges.size() < 2 || !std::is_sorted(ledges.begin(), ledges.end())) {
    throw std::invalid_argument("length_bucket_edges must be sorted with at least two entries");
  }
  const std::size_t nlb = ledges.size() - 1;
  struct Acc {
    std::uint64_t n = 0;
    double rew = 0.0, ris = 0.0, eff = 0.0;
  };
  std::vector<std::vector<Acc>> acc(nlb);
  for (const auto& ep : result.episodes) {
    if (ep.steps.empty()) continue;
    const int len = static_cast<int>(ep.length);
    if (len < ledges.front()) continue;
    std::size_t b = nlb - 1;
    for (std::size_t i = 0; i + 1 < ledges.size(); ++i) {
      if (len >= ledges[i] && len < ledges[i + 1]) {
        b = i;
        break;
      }
    }
    auto& rows = acc[b];
    if (rows.size() < ep.steps.size()) rows.resize(ep.steps.size());
    for (std::size_t c = 0; c < ep.steps.size(); ++c) {
      rows[c].n += 1;
      rows[c].rew += ep.steps[c].reward;
      rows[c].ris += ep.steps[c].ris_pl_db;
      rows[c].eff += ep.steps[c].eff_pl_db;
    }
  }
  for (std::size_t b = 0; b < nlb; ++b) {
    for (std::size_t c = 0; c < acc[b].size(); ++c) {
      const Acc& a = acc[b][c];
      if (a.n == 0) continue;
      PerCycleRow row;
      row.len_lo = ledges[b];
      row.len_hi = b + 1 < nlb ? ledges[b + 1] : -1;
      row.cycle = static_cast<std::uint32_t>(c);
      row.episodes = a.n;
      row.mean_reward = a.rew / static_cast<double>(a.n);
      row.mean_ris_pl_db = a.ris / static_cast<double>(a.n);
      row.mean_eff_pl_db = a.eff / static_cast<double>(a.n);
      rep.per_cycle.push_back(row);
    }
  }

  // Rate improvement bucketed by the pair's xy separation.
  const auto& dedges = cfg.distance_bucket_edges_m;
  if (dedges.size() < 2 || !std::is_sorted(dedges.begin(), dedges.end())) {
    throw std::invalid_argument("distance_bucket_edges_m must be sorted with at least two entries");
  }
  const std::size_t ndb = dedges.size() - 1;
  struct DAcc {
    std::uint64_t n = 0;
    double rd = 0.0, rc = 0.0, imp = 0.0, pct = 0.0;
  };
  std::vector<DAcc> dacc(ndb);
  for (const auto& ep : result.episodes) {
    for (const auto& st : ep.steps) {
      const double d = st.xy_separation_m;
      if (d < dedges.front() || d >= dedges.back()) continue;
      std::size_t b = 0;
      while (b + 1 < ndb && d >= dedges[b + 1]) ++b;
      DAcc& a = dacc[b];
      a.n += 1;
      a.rd += st.rate_direct_bps;
      a.rc += st.rate_combined_bps;
      a.imp += st.rate_combined_bps - st.rate_direct_bps;
      if (st.rate_direct_bps > 0.0) {
        a.pct += 100.0 * (st.rate_combined_bps - st.rate_direct_bps) / st.rate_direct_bps;
      }
    }
  }
  for (std::size_t b = 0; b < ndb; ++b) {
    DistanceBucketRow row;
    row.lo_m = dedges[b];
    row.hi_m = dedges[b + 1];
    row.samples = dacc[b].n;
    if (dacc[b].n > 0) {
      const double n = static_cast<double>(dacc[b].n);
      row.mean_rate_direct_bps = dacc[b].rd / n;
      row.mean_rate_combined_bps = dacc[b].rc / n;
      row.mean_improvement_bps = dacc[b].imp / n;
      row.mean_improvement_pct = dacc[b].pct / n;
    }
    rep.distance_buckets.push_back(row);
  }

  return rep;
}

}  // namespace drsim
