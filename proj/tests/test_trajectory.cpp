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

#include <cmath>
#include <stdexcept>
#include <vector>

#include "doctest.h"
#include "drsim/rng.hpp"
#include "drsim/trajectory.hpp"

using namespace drsim;

namespace {

// Dense-grid oracle for the height search: scan the bracket at fine steps and
// refine once around the best sample.
double best_height_by_grid(double d_half, const TrajectoryConfig& cfg) {
  double best_h = cfg.z_min_m;
  double best_v = height_objective(d_half, cfg.z_min_m, cfg.full_distance_objective);
  const int n = 200000;
  for (int i = 1; i <= n; ++i) {
    const double h = cfg.z_min_m + (cfg.z_max_m - cfg.z_min_m) * i / n;
    const double v = height_objective(d_half, h, cfg.full_distance_objective);
    if (v < best_v) {
      best_v = v;
      best_h = h;
    }
  }
  return best_h;
}

}  // namespace

TEST_SUITE("trajectory") {
  TEST_CASE("height_objective closed form") {
    // cos(arctan(d/h)) = h / sqrt(d^2 + h^2), so the objective has the closed
    // form (d^2 + h^2)^4 / h^6 (default) and (d^2 + h^2)^5 / h^6 (full).
    Rng rng(8);
    for (int i = 0; i < 2000; ++i) {
      const double d = rng.uniform(0.0, 600.0);
      const double h = rng.uniform(1.0, 600.0);
      const double s = d * d + h * h;
      const double h6 = std::pow(h, 6.0);
      CHECK(height_objective(d, h, false) ==
            doctest::Approx(std::pow(s, 4.0) / h6).epsilon(1e-12));
      CHECK(height_objective(d, h, true) ==
            doctest::Approx(std::pow(s, 5.0) / h6).epsilon(1e-12));
    }
  }

  TEST_CASE("optimal_height matches the unclamped closed form") {
    TrajectoryConfig cfg;
    cfg.z_min_m = 1.0;
    cfg.z_max_m = 5000.0;
    Rng rng(9);
    // The search stops once the bracket shrinks below height_tol_m, so the
    // answer is accurate in absolute terms.
    for (int i = 0; i < 200; ++i) {
      const double d = rng.uniform(1.0, 2000.0);
      CHECK(std::fabs(optimal_height(d, cfg) - std::sqrt(3.0) * d) <= 2.0 * cfg.height_tol_m);
    }
    cfg.full_distance_objective = true;
    for (int i = 0; i < 200; ++i) {
      const double d = rng.uniform(1.0, 2000.0);
      CHECK(std::fabs(optimal_height(d, cfg) - std::sqrt(1.5) * d) <= 2.0 * cfg.height_tol_m);
    }
  }

  TEST_CASE("optimal_height clamps to the altitude box") {
    TrajectoryConfig cfg;  // [50, 600]
    CHECK(optimal_height(0.0, cfg) == doctest::Approx(50.0));
    CHECK(optimal_height(10.0, cfg) == doctest::Approx(50.0));  // sqrt(3)*10 < 50
    CHECK(optimal_height(500.0, cfg) == doctest::Approx(600.0));  // sqrt(3)*500 > 600
    const double interior = optimal_height(100.0, cfg);
    CHECK(interior == doctest::Approx(std::sqrt(3.0) * 100.0).epsilon(1e-6));
  }

  TEST_CASE("optimal_height agrees with a dense grid search") {
    TrajectoryConfig cfg;
    Rng rng(10);
    for (int i = 0; i < 20; ++i) {
      const double d = rng.uniform(0.0, 500.0);
      const double got = optimal_height(d, cfg);
      const double want = best_height_by_grid(d, cfg);
      CHECK(std::fabs(got - want) < 0.01);  // grid pitch dominates the gap
    }
    cfg.full_distance_objective = true;
    for (int i = 0; i < 10; ++i) {
      const double d = rng.uniform(0.0, 500.0);
      CHECK(std::fabs(optimal_height(d, cfg) - best_height_by_grid(d, cfg)) < 0.01);
    }
  }

  TEST_CASE("optimal_height rejects bad inputs") {
    TrajectoryConfig cfg;
    CHECK_THROWS_AS((void)optimal_height(-1.0, cfg), std::domain_error);
    cfg.z_min_m = 600.0;
    cfg.z_max_m = 50.0;
    CHECK_THROWS_AS((void)optimal_height(100.0, cfg), std::invalid_argument);
    cfg.z_min_m = 0.0;
    cfg.z_max_m = 100.0;
    CHECK_THROWS_AS((void)optimal_height(100.0, cfg), std::invalid_argument);
  }

  TEST_CASE("optimal_location sits at the xy midpoint") {
    TrajectoryConfig cfg;
    const Vec3 a{100.0, 1000.0, 1.5};
    const Vec3 b{300.0, 1400.0, 2.0};
    const Vec3 loc = optimal_location(a, b, cfg);
    CHECK(loc.x == doctest::Approx(200.0));
    CHECK(loc.y == doctest::Approx(1200.0));
    const double d_half = 0.5 * xy_distance(a, b);
    CHECK(loc.z == doctest::Approx(optimal_height(d_half, cfg)));
  }

  TEST_CASE("step_towards moves at most speed*dt and never overshoots") {
    const Vec3 from{0.0, 0.0, 100.0};
    const Vec3 to{30.0, 40.0, 100.0};  // 50 m away
    const Vec3 one = step_towards(from, to, 15.0, 0.5);  // 7.5 m budget
    CHECK(distance(from, one) == doctest::Approx(7.5).epsilon(1e-12));
    CHECK(one.x == doctest::Approx(30.0 * 7.5 / 50.0));
    CHECK(one.y == doctest::Approx(40.0 * 7.5 / 50.0));

    // Arrival clamps exactly at the target.
    const Vec3 there = step_towards(from, to, 200.0, 0.5);
    CHECK(there.x == to.x);
    CHECK(there.y == to.y);
    CHECK(there.z == to.z);
    const Vec3 still = step_towards(to, to, 15.0, 0.5);
    CHECK(still.x == to.x);
    CHECK(still.y == to.y);
    CHECK(still.z == to.z);

    // Zero speed holds position.
    const Vec3 hold = step_towards(from, to, 0.0, 0.5);
    CHECK(hold.x == from.x);
    CHECK(hold.y == from.y);
    CHECK(hold.z == from.z);

    CHECK_THROWS_AS((void)step_towards(from, to, -1.0, 0.5), std::domain_error);
    CHECK_THROWS_AS((void)step_towards(from, to, 15.0, 0.0), std::domain_error);
    CHECK_THROWS_AS((void)step_towards(from, to, 15.0, -0.5), std::domain_error);
  }

  TEST_CASE("step_towards iterated reaches the target in the expected steps") {
    TrajectoryConfig cfg;
    Vec3 pos{0.0, 0.0, 50.0};
    const Vec3 target{60.0, 80.0, 150.0};  // 141.42 m away, 7.5 m per step -> 19 steps
    int steps = 0;
    while (distance(pos, target) > 0.0 && steps < 100) {
      pos = step_towards(pos, target, cfg.drone_speed_mps, cfg.step_s);
      ++steps;
    }
    CHECK(steps == 19);
    CHECK(pos.x == target.x);
    CHECK(pos.y == target.y);
    CHECK(pos.z == target.z);
  }

  TEST_CASE("select_pair picks the nearest service location") {
    TrajectoryConfig cfg;
    const Vec3 drs{250.0, 1000.0, 150.0};
    std::vector<PairSnapshot> pairs{
        {4, {100.0, 900.0, 1.5}, {150.0, 950.0, 1.5}},
        {2, {200.0, 1800.0, 1.5}, {260.0, 1900.0, 1.5}},
        {9, {240.0, 1010.0, 1.5}, {250.0, 1020.0, 1.5}},
    };
    const auto got = select_pair(drs, pairs, cfg);
    REQUIRE(got.has_value());
    // Pair 9's midpoint is a few metres away; the others sit much farther.
    CHECK(*got == 9);
  }

  TEST_CASE("select_pair applies the xy pre-filter") {
    TrajectoryConfig cfg;
    cfg.pair_xy_threshold_m = 100.0;
    const Vec3 drs{250.0, 1000.0, 150.0};
    std::vector<PairSnapshot> pairs{
        {1, {250.0, 2000.0, 1.5}, {250.0, 2100.0, 1.5}},  // midpoint 1050 m away
    };
    CHECK_FALSE(select_pair(drs, pairs, cfg).has_value());
    pairs.push_back({3, {250.0, 1040.0, 1.5}, {250.0, 1060.0, 1.5}});  // 50 m away
    const auto got = select_pair(drs, pairs, cfg);
    REQUIRE(got.has_value());
    CHECK(*got == 3);
  }

  TEST_CASE("select_pair breaks exact ties toward the lowest id") {
    TrajectoryConfig cfg;
    const Vec3 drs{250.0, 1000.0, 150.0};
    // Two pairs mirrored about the drone x: identical midpoint distance and
    // identical half-separation, hence identical service locations by symmetry.
    std::vector<PairSnapshot> pairs{
        {7, {200.0, 900.0, 1.5}, {300.0, 900.0, 1.5}},
        {5, {200.0, 1100.0, 1.5}, {300.0, 1100.0, 1.5}},
        {6, {200.0, 1100.0, 1.5}, {300.0, 1100.0, 1.5}},
    };
    const auto got = select_pair(drs, pairs, cfg);
    REQUIRE(got.has_value());
    CHECK(*got == 5);
  }

  TEST_CASE("select_pair with empty input") {
    TrajectoryConfig cfg;
    CHECK_FALSE(select_pair({0, 0, 100}, {}, cfg).has_value());
  }
}
