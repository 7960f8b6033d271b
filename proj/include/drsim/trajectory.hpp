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

#include <optional>
#include <span>

#include "drsim/geometry.hpp"

namespace drsim {

struct TrajectoryConfig {
  double z_min_m = 50.0;
  double z_max_m = 600.0;
  double drone_speed_mps = 15.0;
  double step_s = 0.5;
  // Pair-selection pre-filter: only pairs whose midpoint lies within this xy
  // distance of the drone are considered.
  double pair_xy_threshold_m = 1000.0;
  // Alternative objective that keeps the squared-distance dependence of the
  // numerator; shifts the unclamped optimum from sqrt(3)*d to sqrt(3/2)*d.
  bool full_distance_objective = false;
  double height_tol_m = 1e-4;  // absolute bracket tolerance of the height search
};

// Hover-height objective for half-separation d at altitude h. The minimized
// quantity is (d^2 + h^2) / cos^6(arctan(d/h)); the full-distance variant
// squares the numerator.
double height_objective(double d_half, double h, bool full_distance);

// Altitude minimizing the objective over [z_min, z_max], found by
// golden-section search; equals clamp(sqrt(3)*d_half) to within tolerance
// for the default objective. Throws std::invalid_argument on an empty or
// non-positive bracket, std::domain_error for negative d_half.
double optimal_height(double d_half, const TrajectoryConfig& cfg);

// Service location for a pair: xy midpoint at the optimal altitude.
Vec3 optimal_location(const Vec3& a, const Vec3& b, const TrajectoryConfig& cfg);

// One motion step of at most speed*dt toward the target, clamping at
// arrival; never overshoots. Throws std::domain_error for negative speed or
// non-positive dt.
Vec3 step_towards(const Vec3& current, const Vec3& target, double speed_mps, double dt_s);

// Pair geometry as seen by the selector.
struct PairSnapshot {
  int id = 0;
  Vec3 a;
  Vec3 b;
};

// Picks the pair whose service location is nearest to the drone, among pairs
// passing the xy pre-filter; ties break to the lowest id. Empty candidate set
// (or all filtered out) yields nullopt.
std::optional<int> select_pair(const Vec3& drs_position, std::span<const PairSnapshot> pairs,
                               const TrajectoryConfig& cfg);

}  // namespace drsim
