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

#include <span>
#include <stdexcept>

#include "drsim/geometry.hpp"
#include "drsim/ris_config.hpp"
#include "drsim/rng.hpp"

namespace drsim {

// Path losses are carried as positive dB values clamped to [0, pl_cap]; a
// value at the cap represents an absent or unusable link.
inline constexpr double kPathLossCapDb = 300.0;

// Raised when a reflected-link endpoint sits at or inside the far-field
// boundary, where the channel model does not apply.
class near_field_error : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

// Element power pattern: cos^3(theta) within the front hemisphere, zero
// behind the panel plane. Throws std::domain_error outside [0, pi].
double radiation_pattern(double theta);

// Array factor magnitude |Psi| in [0, 1] for the given link geometry.
// Evaluated as the product of two Dirichlet-kernel ratios with the analytic
// limit substituted near their removable singularities.
double psi_factor(const AngleSet& angles, const RisConfig& ris);

// Reflected-link path loss in dB given endpoint distances d1, d2 (m) from
// the panel and the link geometry. Throws near_field_error when d1 or d2 is
// at or below the Fraunhofer distance, std::domain_error for non-positive
// distances. A vanishing pattern or array factor yields the cap.
double ris_far_field_pl(double d1, double d2, const AngleSet& angles, const RisConfig& ris,
                        double pl_cap_db = kPathLossCapDb);

// Same formula with the geometry pre-reduced to pattern values and |Psi|;
// shared by the scalar surface kernel and the orientation-optimal mode.
double ris_far_field_pl_core(double d1, double d2, double pattern_t, double pattern_r,
                             double abs_psi, const RisConfig& ris,
                             double pl_cap_db = kPathLossCapDb);

// True when both endpoint distances lie strictly outside the far-field
// boundary; the non-throwing guard used by the simulation loop.
bool is_far_field(double d1, double d2, const RisConfig& ris);

// Direct-link parameters: carrier, blockage geometry, and the extra-loss
// distribution applied when the line of sight is blocked by a vehicle.
struct DirectChannelConfig {
  double carrier_hz = 5.0e9;
  double lateral_halfwidth_m = 2.0;  // blocker relevance corridor around the segment
  double nlosv_mu_base_db = 9.0;
  double nlosv_mu_slope = 15.0;
  double nlosv_mu_offset_db = 41.0;
  double nlosv_sigma_db = 4.5;
  double pl_cap_db = kPathLossCapDb;
};

// A potential line-of-sight blocker: vehicle body of the given height whose
// base sits at `position` (z component unused).
struct Blocker {
  Vec3 position;
  double height = 0.0;
};

// True when any blocker projects onto the tx-rx segment within the lateral
// corridor and its body height exceeds the antenna sightline at that point.
bool v2v_is_blocked(const Vec3& tx, const Vec3& rx, std::span<const Blocker> blockers,
                    double lateral_halfwidth_m);

// Highway vehicle-to-vehicle path loss in dB: line-of-sight law plus, when
// blocked, a non-negative random extra loss drawn from `rng`.
double v2v_direct_pl(const Vec3& tx, const Vec3& rx, std::span<const Blocker> blockers,
                     const DirectChannelConfig& cfg, Rng& rng);

// Vehicle-to-infrastructure path loss in dB (urban macro line-of-sight law).
double v2i_direct_pl(const Vec3& tx, const Vec3& rx, const DirectChannelConfig& cfg);

// Coherent amplitude combination of the direct and reflected links, dB in and
// out. An input at or above the cap counts as absent; two absent links give
// the cap. The result never exceeds the better input.
double combine_links(double direct_pl_db, double ris_pl_db, double pl_cap_db = kPathLossCapDb);

// Transmit power, noise floor, and the spectral-efficiency scaling used for
// the achievable-rate mapping.
struct LinkBudget {
  double tx_power_dbm = 23.0102999566398125;  // 200 mW
  double noise_dbm = -131.27;
  double eta = 0.82;                 // rate scaling factor, (0, 1]
  double eff_bandwidth_hz = 1.7472e7;
};

double snr_db(double pl_eff_db, const LinkBudget& link);

// Modified Shannon rate eta * B_eff * log2(1 + SNR), bit/s.
double rate_bps(double snr_db_value, const LinkBudget& link);

}  // namespace drsim
