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

#include "drsim/geometry.hpp"

namespace drsim {

// Reflecting panel and link-gain parameters. Gains are stored in dBi and
// converted where used; geometry is metric.
struct RisConfig {
  int rows = 100;              // element count along the panel x axis (M)
  int cols = 102;              // element count along the panel y axis (N)
  double dx_m = 0.01;          // element pitch along x, m
  double dy_m = 0.01;          // element pitch along y, m
  double reflect_amp = 0.9;    // per-element reflection amplitude A, [0, 1]
  double gain_tx_dbi = 9.03;   // transmit antenna gain
  double gain_rx_dbi = 0.0;    // receive antenna gain
  double gain_cell_dbi = 0.0;  // per-element scattering gain
  double carrier_hz = 5.0e9;

  double wavelength_m() const { return kSpeedOfLight / carrier_hz; }
};

// Far-field boundary 2 D^2 / lambda, with D the panel diagonal.
double fraunhofer_distance(const RisConfig& ris);

}  // namespace drsim
