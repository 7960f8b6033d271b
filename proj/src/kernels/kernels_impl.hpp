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

#include "drsim/kernels/pathloss_grid.hpp"

#ifndef DRSIM_HAVE_AVX2_TU
#define DRSIM_HAVE_AVX2_TU 0
#endif

// Private implementation entry points behind the public dispatch layer.
namespace drsim::kernels::impl {

void grid_scalar(const SurfaceJob& job, std::span<double> out_pl_db,
                 std::span<std::uint8_t> out_near_field);
void psi_scalar(std::span<const double> theta_t, std::span<const double> phi_t,
                std::span<const double> theta_r, std::span<const double> phi_r,
                const RisConfig& ris, std::span<double> out_abs_psi);

#if DRSIM_HAVE_AVX2_TU
void grid_avx2(const SurfaceJob& job, std::span<double> out_pl_db,
               std::span<std::uint8_t> out_near_field);
void psi_avx2(std::span<const double> theta_t, std::span<const double> phi_t,
              std::span<const double> theta_r, std::span<const double> phi_r,
              const RisConfig& ris, std::span<double> out_abs_psi);
#endif

}  // namespace drsim::kernels::impl
