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

#include "drsim/rl.hpp"

#include <algorithm>
#include <cmath>
#include <istream>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

namespace drsim {

namespace {

constexpr std::array<double, 4> kSpeedFractions{1.0, 0.75, 0.5, 0.25};
constexpr int kHoldAction = 8;

std::uint16_t elevation_bin(double theta, int c) {
  theta = std::clamp(theta, 0.0, kPi / 2.0);
  const double warped = std::sqrt(theta / (kPi / 2.0));
  const int bin = static_cast<int>(std::floor(c * warped));
  return static_cast<std::uint16_t>(std::min(bin, c - 1));
}

std::uint16_t azimuth_bin(double phi, int c) {
  const double mag = std::fabs(phi) / kPi;
  const double u = std::copysign(mag * mag, phi);
  const int bin = static_cast<int>(std::floor(c * (u + 1.0) / 2.0));
  return static_cast<std::uint16_t>(std::clamp(bin, 0, c - 1));
}

// Lowest-index argmax over the first `na` entries; deterministic, draws no
// randomness (bootstrap selection only - behavioral ties break uniformly).
ActionId argmax_first(const std::array<double, kMaxActions>& q, int na) {
  ActionId best = 0;
  for (ActionId a = 1; a < na; ++a) {
    if (q[a] > q[best]) best = a;
  }
  return best;
}

}  // namespace

int num_actions(const AgentConfig& cfg) { return cfg.allow_hold ? 9 : 8; }

ActionSpec action_spec(ActionId a, const AgentConfig& cfg) {
  if (a < 0 || a >= num_actions(cfg))
    throw std::domain_error("action_spec: action id out of range");
  if (a == kHoldAction) return {Turn::hold, 0.0};
  const Turn dir = a < 4 ? Turn::left : Turn::right;
  return {dir, kSpeedFractions[a % 4]};
}

std::uint64_t QTables::key(const StateIndex& s) {
  return (static_cast<std::uint64_t>(s.bins[0]) << 48) |
         (static_cast<std::uint64_t>(s.bins[1]) << 32) |
         (static_cast<std::uint64_t>(s.bins[2]) << 16) |
         static_cast<std::uint64_t>(s.bins[3]);
}

const QTables::Cell* QTables::find(const StateIndex& s) const {
  const auto it = cells_.find(key(s));
  return it == cells_.end() ? nullptr : &it->second;
}

double QTables::q1(const StateIndex& s, ActionId a) const {
  const Cell* c = find(s);
  return c ? c->q1[a] : 0.0;
}

double QTables::q2(const StateIndex& s, ActionId a) const {
  const Cell* c = find(s);
  return c ? c->q2[a] : 0.0;
}

double QTables::q_sum(const StateIndex& s, ActionId a) const {
  const Cell* c = find(s);
  return c ? c->q1[a] + c->q2[a] : 0.0;
}

std::uint32_t QTables::visits(const StateIndex& s, ActionId a) const {
  const Cell* c = find(s);
  return c ? c->visits[a] : 0;
}

void QTables::save(std::ostream& os) const {
  os << "drsim-qtable 1\n";
  os << "n " << n_ << "\n";
  std::vector<std::uint64_t> keys;
  keys.reserve(cells_.size());
  for (const auto& [k, cell] : cells_) keys.push_back(k);
  std::sort(keys.begin(), keys.end());

  os.precision(17);
  std::size_t rows = 0;
  for (const std::uint64_t k : keys) {
    const Cell& cell = cells_.at(k);
    for (int a = 0; a < kMaxActions; ++a) {
      if (cell.visits[a] == 0) continue;
      os << (k >> 48) << ' ' << ((k >> 32) & 0xffff) << ' ' << ((k >> 16) & 0xffff) << ' '
         << (k & 0xffff) << ' ' << a << ' ' << cell.q1[a] << ' ' << cell.q2[a] << ' '
         << cell.visits[a] << '\n';
      ++rows;
    }
  }
  os << "end " << rows << "\n";
}

QTables QTables::load(std::istream& is) {
  std::string magic;
  int version = 0;
  if (!(is >> magic >> version) || magic != "drsim-qtable" || version != 1)
    throw std::runtime_error("QTables::load: unrecognized checkpoint header");

  QTables t;
  std::string tag;
  if (!(is >> tag >> t.n_) || tag != "n")
    throw std::runtime_error("QTables::load: malformed update counter");

  std::size_t rows = 0;
  for (;;) {
    if (!(is >> tag)) throw std::runtime_error("QTables::load: missing end marker");
    if (tag == "end") break;
    StateIndex s;
    s.bins[0] = static_cast<std::uint16_t>(std::stoul(tag));
    int a = 0;
    std::uint32_t v = 0;
    double q1 = 0.0, q2 = 0.0;
    if (!(is >> s.bins[1] >> s.bins[2] >> s.bins[3] >> a >> q1 >> q2 >> v) || a < 0 ||
        a >= kMaxActions)
      throw std::runtime_error("QTables::load: malformed row");
    Cell& cell = t.cells_[key(s)];
    cell.q1[a] = q1;
    cell.q2[a] = q2;
    cell.visits[a] = v;
    ++rows;
  }
  std::size_t declared = 0;
  if (!(is >> declared) || declared != rows)
    throw std::runtime_error("QTables::load: row count mismatch");
  return t;
}

StateIndex quantize_state(const AngleSet& angles, const AgentConfig& cfg) {
  if (cfg.c_theta < 1 || cfg.c_theta > 65535 || cfg.c_phi < 1 || cfg.c_phi > 65535)
    throw std::domain_error("quantize_state: bin cardinality out of range");
  StateIndex s;
  s.bins[0] = azimuth_bin(angles.phi_r, cfg.c_phi);
  s.bins[1] = azimuth_bin(angles.phi_t, cfg.c_phi);
  s.bins[2] = elevation_bin(angles.theta_r, cfg.c_theta);
  s.bins[3] = elevation_bin(angles.theta_t, cfg.c_theta);
  return s;
}

double reward(double pl_prev_db, double pl_cur_db) {
  return -10.0 * (pl_cur_db - pl_prev_db);
}

double learning_rate(std::uint64_t n) {
  if (n == 0) throw std::domain_error("learning_rate: counter must be positive");
  // n^(-2/14) via exp2/log2: exact for n a power of two, where log2 is an
  // integer and the division by 7 of small integers is exact or benign.
  return std::exp2(-std::log2(static_cast<double>(n)) / 7.0);
}

ActionId choose_action(const StateIndex& s, const QTables& tables, const AgentConfig& cfg,
                       Rng& rng) {
  const int na = num_actions(cfg);
  if (cfg.epsilon > 0.0 && rng.uniform01() < cfg.epsilon)
    return static_cast<ActionId>(rng.uniform_index(na));

  std::array<ActionId, kMaxActions> pick{};
  int n_pick = 0;
  // The unvisited-first preference is an exploration device; epsilon == 0
  // means testing mode, which disables exploration entirely and acts greedily
  // on q1+q2 (fresh states then tie-break uniformly across all actions).
  if (cfg.epsilon > 0.0) {
    for (ActionId a = 0; a < na; ++a) {
      if (tables.visits(s, a) == 0) pick[n_pick++] = a;
    }
  }
  if (n_pick == 0) {
    double best = tables.q_sum(s, 0);
    pick[n_pick++] = 0;
    for (ActionId a = 1; a < na; ++a) {
      const double q = tables.q_sum(s, a);
      if (q > best) {
        best = q;
        n_pick = 0;
        pick[n_pick++] = a;
      } else if (q == best) {
        pick[n_pick++] = a;
      }
    }
  }
  if (n_pick == 1) return pick[0];
  return pick[rng.uniform_index(static_cast<std::uint64_t>(n_pick))];
}

void update(QTables& tables, const StateIndex& s, ActionId a, double r,
            const std::optional<StateIndex>& next, const AgentConfig& cfg, Rng& rng) {
  const int na = num_actions(cfg);
  if (a < 0 || a >= na) throw std::domain_error("update: action id out of range");

  tables.n_ += 1;
  const double alpha = learning_rate(tables.n_);
  const bool use_q1 = cfg.single_estimator ? true : rng.uniform01() < 0.5;

  double bootstrap = 0.0;
  if (next) {
    static const QTables::Cell kZero{};
    const QTables::Cell* found = tables.find(*next);
    const QTables::Cell& next_cell = found ? *found : kZero;
    if (cfg.single_estimator) {
      bootstrap = next_cell.q1[argmax_first(next_cell.q1, na)];
    } else if (use_q1) {
      // Own argmax, other table's value.
      bootstrap = next_cell.q2[argmax_first(next_cell.q1, na)];
    } else {
      bootstrap = next_cell.q1[argmax_first(next_cell.q2, na)];
    }
  }

  QTables::Cell& cell = tables.cell(s);
  double& q = use_q1 ? cell.q1[a] : cell.q2[a];
  q += alpha * (r + cfg.discount * bootstrap - q);
  cell.visits[a] += 1;
}

Pose apply_yaw_action(const Pose& pose, ActionId a, const AgentConfig& cfg) {
  const ActionSpec spec = action_spec(a, cfg);
  if (spec.direction == Turn::hold) return pose;  // exact no-op
  const double mag = spec.speed_fraction * cfg.max_yaw_rate_rad_s * cfg.step_s;
  const double delta = spec.direction == Turn::left ? mag : -mag;
  return {pose.position, wrap_angle(pose.yaw + delta)};
}

}  // namespace drsim
