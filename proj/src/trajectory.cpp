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

#include "drsim/trajectory.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

namespace drsim {

namespace {

// Golden-section minimization of a unimodal function on [lo, hi] to an
// absolute bracket tolerance.
template <typename F>
double golden_section_min(F f, double lo, double hi, double tol) {
  const double inv_phi = (std::sqrt(5.0) - 1.0) / 2.0;
  double a = lo, b = hi;
  double c = b - inv_phi * (b - a);
  double d = a + inv_phi * (b - a);
  double fc = f(c);
  double fd = f(d);
  while (b - a > tol) {
    if (fc < fd) {
      b = d;
      d = c;
      fd = fc;
      c = b - inv_phi * (b - a);
      fc = f(c);
    } else {
      a = c;
      c = d;
      fc = fd;
      d = a + inv_phi * (b - a);
      fd = f(d);
    }
  }
  return 0.5 * (a + b);
}

}  // namespace

double height_objective(double d_half, double h, bool full_distance) {
  if (!(h > 0.0)) throw std::domain_error("height_objective: altitude must be positive");
  const double r2 = d_half * d_half + h * h;
  const double c = std::cos(std::atan2(d_half, h));
  const double c6 = c * c * c * c * c * c;
  const double num = full_distance ? r2 * r2 : r2;
  return num / c6;
}

double optimal_height(double d_half, const TrajectoryConfig& cfg) {
  if (d_half < 0.0) throw std::domain_error("optimal_height: negative half-separation");
  if (!(cfg.z_min_m > 0.0) || !(cfg.z_max_m >= cfg.z_min_m))
    throw std::invalid_argument("optimal_height: invalid altitude bracket");
  if (cfg.z_max_m == cfg.z_min_m) return cfg.z_min_m;
  const bool full = cfg.full_distance_objective;
  return golden_section_min(
      [d_half, full](double h) { return height_objective(d_half, h, full); }, cfg.z_min_m,
      cfg.z_max_m, cfg.height_tol_m);
}

Vec3 optimal_location(const Vec3& a, const Vec3& b, const TrajectoryConfig& cfg) {
  const double d_half = 0.5 * xy_distance(a, b);
  const double z = optimal_height(d_half, cfg);
  return {0.5 * (a.x + b.x), 0.5 * (a.y + b.y), z};
}

Vec3 step_towards(const Vec3& current, const Vec3& target, double speed_mps, double dt_s) {
  if (speed_mps < 0.0) throw std::domain_error("step_towards: negative speed");
  if (!(dt_s > 0.0)) throw std::domain_error("step_towards: non-positive step duration");
  const Vec3 delta = target - current;
  const double dist = norm(delta);
  const double step = speed_mps * dt_s;
  if (dist <= step) return target;
  return current + delta * (step / dist);
}

std::optional<int> select_pair(const Vec3& drs_position, std::span<const PairSnapshot> pairs,
                               const TrajectoryConfig& cfg) {
  std::optional<int> best;
  double best_dist = std::numeric_limits<double>::infinity();
  for (const PairSnapshot& p : pairs) {
    const Vec3 mid{0.5 * (p.a.x + p.b.x), 0.5 * (p.a.y + p.b.y), 0.0};
    if (xy_distance(drs_position, mid) > cfg.pair_xy_threshold_m) continue;
    const double d = distance(drs_position, optimal_location(p.a, p.b, cfg));
    if (d < best_dist || (d == best_dist && best && p.id < *best)) {
      best_dist = d;
      best = p.id;
    }
  }
  return best;
}

}  // namespace drsim
