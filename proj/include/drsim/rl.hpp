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

#include <array>
#include <cstdint>
#include <iosfwd>
#include <optional>
#include <unordered_map>

#include "drsim/geometry.hpp"
#include "drsim/rng.hpp"

namespace drsim {

// Quantized link geometry: azimuth bins toward receiver and transmitter,
// then elevation bins toward receiver and transmitter.
struct StateIndex {
  std::array<std::uint16_t, 4> bins{};  // (phi_r, phi_t, theta_r, theta_t)
  friend bool operator==(const StateIndex&, const StateIndex&) = default;
};

enum class Turn : std::uint8_t { left, right, hold };

// Yaw command: a turn direction and a fraction of the maximum yaw rate.
struct ActionSpec {
  Turn direction = Turn::left;
  double speed_fraction = 1.0;
};

using ActionId = int;

struct AgentConfig {
  double epsilon = 0.2;            // exploration probability, [0, 1]
  // gamma, [0, 1]. The default is 0: the reward is already a one-step path-loss
  // delta, and with ~3 visits per state at usual run lengths a bootstrapped
  // target adds more noise than signal (measured: gamma 0 maximizes the
  // trained-vs-random gap while keeping the within-run learning curve rising).
  double discount = 0.0;
  int c_theta = 100;               // elevation bin count per angle, [1, 65535]
  int c_phi = 100;                 // azimuth bin count per angle, [1, 65535]
  double max_yaw_rate_rad_s = 0.349;
  double step_s = 0.5;
  bool allow_hold = false;         // optional ninth do-nothing action
  bool single_estimator = false;   // classic one-table update instead of the pair
};

inline constexpr int kMaxActions = 9;

// Eight turn actions ({left, right} x {1, 0.75, 0.5, 0.25} of the maximum
// yaw rate), plus an optional hold action when enabled.
int num_actions(const AgentConfig& cfg);
ActionSpec action_spec(ActionId a, const AgentConfig& cfg);

// Paired sparse action-value tables with visit counts and the global update
// counter. Unwritten entries read as zero.
class QTables {
 public:
  struct Cell {
    std::array<double, kMaxActions> q1{};
    std::array<double, kMaxActions> q2{};
    std::array<std::uint32_t, kMaxActions> visits{};
  };

  double q1(const StateIndex& s, ActionId a) const;
  double q2(const StateIndex& s, ActionId a) const;
  double q_sum(const StateIndex& s, ActionId a) const;  // q1 + q2, greedy criterion
  std::uint32_t visits(const StateIndex& s, ActionId a) const;
  std::uint64_t update_count() const { return n_; }
  std::size_t state_count() const { return cells_.size(); }

  // Versioned plain-text round trip; rows are emitted in sorted key order so
  // identical tables serialize identically.
  void save(std::ostream& os) const;
  static QTables load(std::istream& is);

 private:
  friend void update(QTables&, const StateIndex&, ActionId, double,
                     const std::optional<StateIndex>&, const AgentConfig&, Rng&);

  static std::uint64_t key(const StateIndex& s);
  Cell& cell(const StateIndex& s) { return cells_[key(s)]; }
  const Cell* find(const StateIndex& s) const;

  std::unordered_map<std::uint64_t, Cell> cells_;
  std::uint64_t n_ = 0;  // global update counter driving the step size
};

// Quantizes link angles into the state index. Elevations are clipped to
// [0, pi/2] and binned on a square-root warp (finer near boresight);
// azimuths are binned on a signed quadratic warp (finer near +-pi).
StateIndex quantize_state(const AngleSet& angles, const AgentConfig& cfg);

// Reward for a step: -10 times the change of reflected-link path loss in dB.
double reward(double pl_prev_db, double pl_cur_db);

// Step size n^(-2/14). Exact at powers of two; throws std::domain_error for
// n = 0.
double learning_rate(std::uint64_t n);

// Epsilon-greedy with an unvisited-first preference: with probability epsilon
// a uniform action; otherwise a uniform choice among never-visited actions if
// any exist, else the argmax of q1+q2 with uniform tie-breaking. Epsilon = 0
// is testing mode: all exploration (including the unvisited preference) is
// off and the choice is purely greedy.
ActionId choose_action(const StateIndex& s, const QTables& tables, const AgentConfig& cfg,
                       Rng& rng);

// One double-estimator update: a fair coin picks the table, the chosen table
// bootstraps through the other at its own argmax. Absent `next` (terminal)
// bootstraps zero. Increments the visit count and the global counter; the
// step size uses the incremented counter.
void update(QTables& tables, const StateIndex& s, ActionId a, double r,
            const std::optional<StateIndex>& next, const AgentConfig& cfg, Rng& rng);

// Applies a yaw command to the pose; right turns decrement yaw. The result
// stays wrapped in (-pi, pi].
Pose apply_yaw_action(const Pose& pose, ActionId a, const AgentConfig& cfg);

}  // namespace drsim
