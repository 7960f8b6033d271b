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

#include <cmath>
#include <numbers>
#include <utility>

namespace drsim {

inline constexpr double kPi = std::numbers::pi;
inline constexpr double kSpeedOfLight = 299792458.0;  // m/s

struct Vec3 {
  double x = 0.0;
  double y = 0.0;
  double z = 0.0;

  friend Vec3 operator+(const Vec3& a, const Vec3& b) { return {a.x + b.x, a.y + b.y, a.z + b.z}; }
  friend Vec3 operator-(const Vec3& a, const Vec3& b) { return {a.x - b.x, a.y - b.y, a.z - b.z}; }
  friend Vec3 operator*(const Vec3& a, double s) { return {a.x * s, a.y * s, a.z * s}; }
  friend Vec3 operator*(double s, const Vec3& a) { return a * s; }
};

inline double norm(const Vec3& v) { return std::sqrt(v.x * v.x + v.y * v.y + v.z * v.z); }
inline double distance(const Vec3& a, const Vec3& b) { return norm(a - b); }
inline double xy_distance(const Vec3& a, const Vec3& b) {
  return std::hypot(a.x - b.x, a.y - b.y);
}

// Panel pose: position plus yaw about the world z axis. The reflecting face
// points straight down (boresight -z), so yaw is the panel's only rotational
// degree of freedom.
struct Pose {
  Vec3 position;
  double yaw = 0.0;  // rad, wrapped into (-pi, pi]
};

// Departure/arrival geometry of one reflected link, expressed in the panel
// frame. Elevations are measured from boresight (straight down = 0); azimuths
// are measured in the panel plane and follow the panel as it yaws.
struct AngleSet {
  double theta_t = 0.0;  // elevation toward the transmitter, [0, pi]
  double phi_t = 0.0;    // azimuth toward the transmitter, (-pi, pi]
  double theta_r = 0.0;  // elevation toward the receiver, [0, pi]
  double phi_r = 0.0;    // azimuth toward the receiver, (-pi, pi]
};

// Wraps an angle into (-pi, pi].
double wrap_angle(double a);

// Elevation/azimuth of `node` as seen from the panel at `pose`.
// Throws std::domain_error if the node coincides with the panel position.
// A node on boresight has zero elevation and, by convention, zero azimuth.
std::pair<double, double> angles_to_node(const Pose& pose, const Vec3& node);

// Both ends of a reflected link in one call.
AngleSet angles_to_pair(const Pose& pose, const Vec3& tx, const Vec3& rx);

// Magnitude of the single-axis rotation taking yaw `from` to yaw `to`,
// in [0, pi].
double yaw_rotation_angle(double from, double to);

}  // namespace drsim
