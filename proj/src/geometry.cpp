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

#include "drsim/geometry.hpp"

#include <stdexcept>

#include "drsim/ris_config.hpp"

namespace drsim {

double wrap_angle(double a) {
  double r = std::fmod(a + kPi, 2.0 * kPi);
  if (r <= 0.0) r += 2.0 * kPi;
  return r - kPi;
}

std::pair<double, double> angles_to_node(const Pose& pose, const Vec3& node) {
  const Vec3 w = node - pose.position;
  const double d = norm(w);
  if (d == 0.0) throw std::domain_error("angles_to_node: node coincides with panel position");

  // Boresight is -z: a node straight below sits at zero elevation.
  double ct = -w.z / d;
  if (ct > 1.0) ct = 1.0;
  if (ct < -1.0) ct = -1.0;
  const double theta = std::acos(ct);

  // Horizontal displacement rotated into the panel frame (rotation by -yaw).
  const double c = std::cos(pose.yaw);
  const double s = std::sin(pose.yaw);
  const double hx = c * w.x + s * w.y;
  const double hy = -s * w.x + c * w.y;
  const double phi = (hx == 0.0 && hy == 0.0) ? 0.0 : std::atan2(hy, hx);
  return {theta, phi};
}

AngleSet angles_to_pair(const Pose& pose, const Vec3& tx, const Vec3& rx) {
  const auto [theta_t, phi_t] = angles_to_node(pose, tx);
  const auto [theta_r, phi_r] = angles_to_node(pose, rx);
  return {theta_t, phi_t, theta_r, phi_r};
}

double yaw_rotation_angle(double from, double to) {
  return std::fabs(wrap_angle(to - from));
}

double fraunhofer_distance(const RisConfig& ris) {
  if (ris.rows < 1 || ris.cols < 1 || !(ris.dx_m > 0.0) || !(ris.dy_m > 0.0) || !(ris.carrier_hz > 0.0))
    throw std::domain_error("fraunhofer_distance: invalid panel parameters");
  const double ax = ris.rows * ris.dx_m;
  const double ay = ris.cols * ris.dy_m;
  const double d2 = ax * ax + ay * ay;  // squared panel diagonal
  return 2.0 * d2 / ris.wavelength_m();
}

}  // namespace drsim
