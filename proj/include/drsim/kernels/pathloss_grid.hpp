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
#include <span>
#include <string>

#include "drsim/channel.hpp"
#include "drsim/geometry.hpp"
#include "drsim/ris_config.hpp"

// Batch evaluation of the reflected-link path loss. Two implementations sit
// behind runtime dispatch: a scalar reference that composes the scalar
// channel ops cell by cell, and an AVX2 variant using the algebraically
// identical trig-free formulation. The variants are equivalence-tested at a
// pinned tolerance; the scalar path is bit-equal to the channel module.
namespace drsim::kernels {

enum class Backend { scalar, avx2 };

// Cell centers: x_i = x0 + i*dx (i < nx), y_j = y0 + j*dy (j < ny), all at
// altitude z with panel yaw `yaw`. Output index = j*nx + i (row-major in y).
struct GridSpec {
  double x0 = 0.0;
  double dx = 1.0;
  int nx = 1;
  double y0 = 0.0;
  double dy = 1.0;
  int ny = 1;
  double z = 0.0;
  double yaw = 0.0;
};

struct SurfaceJob {
  Vec3 node_a;  // transmitter
  Vec3 node_b;  // receiver
  GridSpec grid;
  RisConfig ris;
  double pl_cap_db = kPathLossCapDb;
};

// Fills out_pl_db[nx*ny] and out_near_field[nx*ny] (1 where an endpoint
// distance is at or inside the far-field boundary; such cells carry the cap).
void ris_pathloss_grid(const SurfaceJob& job, std::span<double> out_pl_db,
                       std::span<std::uint8_t> out_near_field);

// Array-factor magnitudes for packed angle arrays (all spans equal length).
void psi_batch(std::span<const double> theta_t, std::span<const double> phi_t,
               std::span<const double> theta_r, std::span<const double> phi_r,
               const RisConfig& ris, std::span<double> out_abs_psi);

// Backend selection. The default resolves at first use: AVX2 when the build
// carries the lane and the CPU supports it, scalar otherwise. force_backend
// throws std::runtime_error if the requested lane is unavailable.
Backend preferred_backend();
Backend active_backend();
void force_backend(Backend b);
void reset_backend();  // back to automatic selection
bool cpu_supports_avx2();
std::string backend_name(Backend b);

namespace detail {
// Exported for accuracy tests; array forms so callers need no AVX2 flags.
// Available only when the AVX2 lane is compiled in and supported at runtime.
void vsin4_avx2(const double in[4], double out[4]);
void vcos4_avx2(const double in[4], double out[4]);
void vlog10_4_avx2(const double in[4], double out[4]);
}  // namespace detail

}  // namespace drsim::kernels
