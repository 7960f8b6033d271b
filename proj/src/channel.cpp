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

#include "drsim/channel.hpp"

#include <algorithm>
#include <cmath>

namespace drsim {

namespace {

constexpr double kSinGuard = 1e-9;  // switch to the analytic limit below this

inline double dbi_to_linear(double dbi) { return std::pow(10.0, dbi / 10.0); }

inline double clamp_pl(double db, double cap) {
  if (!(db > 0.0)) return 0.0;
  return db < cap ? db : cap;
}

// |sin(k u) / (k sin u)| with the L'Hopital limit |cos(k u) / cos(u)| near
// u = m*pi; both branches are clamped to [0, 1], the analytic bound.
double dirichlet_factor(int k, double u) {
  const double su = std::sin(u);
  double r;
  if (std::fabs(su) < kSinGuard) {
    r = std::cos(k * u) / std::cos(u);
  } else {
    r = std::sin(k * u) / (k * su);
  }
  r = std::fabs(r);
  return r > 1.0 ? 1.0 : r;
}

}  // namespace

double radiation_pattern(double theta) {
  if (!(theta >= 0.0) || !(theta <= kPi))
    throw std::domain_error("radiation_pattern: elevation outside [0, pi]");
  if (theta > kPi / 2.0) return 0.0;
  const double c = std::cos(theta);
  return c * c * c;
}

double psi_factor(const AngleSet& a, const RisConfig& ris) {
  const double lam = ris.wavelength_m();
  const double su =
      std::sin(a.theta_t) * std::cos(a.phi_t) + std::sin(a.theta_r) * std::cos(a.phi_r);
  const double sv =
      std::sin(a.theta_t) * std::sin(a.phi_t) + std::sin(a.theta_r) * std::sin(a.phi_r);
  const double fx = dirichlet_factor(ris.rows, kPi * ris.dx_m / lam * su);
  const double fy = dirichlet_factor(ris.cols, kPi * ris.dy_m / lam * sv);
  return fx * fy;
}

double ris_far_field_pl_core(double d1, double d2, double pattern_t, double pattern_r,
                             double abs_psi, const RisConfig& ris, double pl_cap_db) {
  if (!(d1 > 0.0) || !(d2 > 0.0))
    throw std::domain_error("ris_far_field_pl: distances must be positive");

  const double lam = ris.wavelength_m();
  const double m = static_cast<double>(ris.rows);
  const double n = static_cast<double>(ris.cols);
  const double gains = dbi_to_linear(ris.gain_tx_dbi) * dbi_to_linear(ris.gain_rx_dbi) *
                       dbi_to_linear(ris.gain_cell_dbi);
  const double denom = gains * m * m * n * n * ris.dx_m * ris.dy_m * lam * lam * pattern_t *
                       pattern_r * ris.reflect_amp * ris.reflect_amp * abs_psi * abs_psi;
  if (denom == 0.0) return pl_cap_db;

  const double num = 64.0 * kPi * kPi * kPi * d1 * d1 * d2 * d2;
  return clamp_pl(10.0 * std::log10(num / denom), pl_cap_db);
}

double ris_far_field_pl(double d1, double d2, const AngleSet& angles, const RisConfig& ris,
                        double pl_cap_db) {
  if (!(d1 > 0.0) || !(d2 > 0.0))
    throw std::domain_error("ris_far_field_pl: distances must be positive");
  if (!is_far_field(d1, d2, ris))
    throw near_field_error("ris_far_field_pl: endpoint inside the far-field boundary");
  const double ft = radiation_pattern(angles.theta_t);
  const double fr = radiation_pattern(angles.theta_r);
  const double psi = psi_factor(angles, ris);
  return ris_far_field_pl_core(d1, d2, ft, fr, psi, ris, pl_cap_db);
}

bool is_far_field(double d1, double d2, const RisConfig& ris) {
  const double dfr = fraunhofer_distance(ris);
  return d1 > dfr && d2 > dfr;
}

bool v2v_is_blocked(const Vec3& tx, const Vec3& rx, std::span<const Blocker> blockers,
                    double lateral_halfwidth_m) {
  const double abx = rx.x - tx.x;
  const double aby = rx.y - tx.y;
  const double len2 = abx * abx + aby * aby;
  if (len2 == 0.0) return false;
  for (const Blocker& blk : blockers) {
    const double apx = blk.position.x - tx.x;
    const double apy = blk.position.y - tx.y;
    const double t = (apx * abx + apy * aby) / len2;
    if (t <= 0.0 || t >= 1.0) continue;  // only blockers strictly between the endpoints
    const double cx = tx.x + t * abx;
    const double cy = tx.y + t * aby;
    const double lateral = std::hypot(blk.position.x - cx, blk.position.y - cy);
    if (lateral > lateral_halfwidth_m) continue;
    const double sightline_z = tx.z + t * (rx.z - tx.z);
    if (blk.height > sightline_z) return true;
  }
  return false;
}

double v2v_direct_pl(const Vec3& tx, const Vec3& rx, std::span<const Blocker> blockers,
                     const DirectChannelConfig& cfg, Rng& rng) {
  const double d = distance(tx, rx);
  if (!(d > 0.0)) throw std::domain_error("v2v_direct_pl: endpoints coincide");
  double pl = 32.4 + 20.0 * std::log10(d) + 20.0 * std::log10(cfg.carrier_hz / 1.0e9);
  if (v2v_is_blocked(tx, rx, blockers, cfg.lateral_halfwidth_m)) {
    const double mu =
        cfg.nlosv_mu_base_db +
        std::max(0.0, cfg.nlosv_mu_slope * std::log10(d) - cfg.nlosv_mu_offset_db);
    const double extra = rng.normal(mu, cfg.nlosv_sigma_db);
    pl += std::max(0.0, extra);  // truncated at zero: blockage never helps
  }
  return clamp_pl(pl, cfg.pl_cap_db);
}

double v2i_direct_pl(const Vec3& tx, const Vec3& rx, const DirectChannelConfig& cfg) {
  const double d = distance(tx, rx);
  if (!(d > 0.0)) throw std::domain_error("v2i_direct_pl: endpoints coincide");
  const double pl = 28.0 + 22.0 * std::log10(d) + 20.0 * std::log10(cfg.carrier_hz / 1.0e9);
  return clamp_pl(pl, cfg.pl_cap_db);
}

double combine_links(double direct_pl_db, double ris_pl_db, double pl_cap_db) {
  const bool have_direct = direct_pl_db < pl_cap_db;
  const bool have_ris = ris_pl_db < pl_cap_db;
  if (!have_direct && !have_ris) return pl_cap_db;
  if (!have_direct) return ris_pl_db;
  if (!have_ris) return direct_pl_db;
  const double amp = std::pow(10.0, -direct_pl_db / 20.0) + std::pow(10.0, -ris_pl_db / 20.0);
  return clamp_pl(-20.0 * std::log10(amp), pl_cap_db);
}

double snr_db(double pl_eff_db, const LinkBudget& link) {
  return link.tx_power_dbm - pl_eff_db - link.noise_dbm;
}

double rate_bps(double snr_db_value, const LinkBudget& link) {
  const double snr_lin = std::pow(10.0, snr_db_value / 10.0);
  return link.eta * link.eff_bandwidth_hz * std::log2(1.0 + snr_lin);
}

}  // namespace drsim
