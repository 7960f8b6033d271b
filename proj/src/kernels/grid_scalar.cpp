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

// Scalar reference kernel: a straight composition of the scalar channel ops,
// one cell at a time. Kept deliberately simple; this is the ground truth the
// vectorized variant is tested against.

#include "kernels_impl.hpp"

namespace drsim::kernels::impl {

void grid_scalar(const SurfaceJob& job, std::span<double> out_pl_db,
                 std::span<std::uint8_t> out_near_field) {
  const GridSpec& g = job.grid;
  std::size_t idx = 0;
  for (int j = 0; j < g.ny; ++j) {
    const double y = g.y0 + j * g.dy;
    for (int i = 0; i < g.nx; ++i, ++idx) {
      const double x = g.x0 + i * g.dx;
      const Pose pose{{x, y, g.z}, g.yaw};
      const double d1 = distance(pose.position, job.node_a);
      const double d2 = distance(pose.position, job.node_b);
      if (!is_far_field(d1, d2, job.ris)) {
        out_pl_db[idx] = job.pl_cap_db;
        out_near_field[idx] = 1;
        continue;
      }
      const AngleSet angles = angles_to_pair(pose, job.node_a, job.node_b);
      out_pl_db[idx] = ris_far_field_pl(d1, d2, angles, job.ris, job.pl_cap_db);
      out_near_field[idx] = 0;
    }
  }
}

void psi_scalar(std::span<const double> theta_t, std::span<const double> phi_t,
                std::span<const double> theta_r, std::span<const double> phi_r,
                const RisConfig& ris, std::span<double> out_abs_psi) {
  for (std::size_t i = 0; i < theta_t.size(); ++i) {
    out_abs_psi[i] = psi_factor({theta_t[i], phi_t[i], theta_r[i], phi_r[i]}, ris);
  }
}

}  // namespace drsim::kernels::impl
