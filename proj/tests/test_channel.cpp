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
#include "drsim/channel.hpp"
#include "drsim/geometry.hpp"
#include "drsim/ris_config.hpp"
#include "drsim/rng.hpp"

using namespace drsim;

namespace {

AngleSet random_angles(Rng& rng) {
  return {rng.uniform(0.0, kPi / 2), rng.uniform(-kPi, kPi), rng.uniform(0.0, kPi / 2),
          rng.uniform(-kPi, kPi)};
}

// Hand evaluation of the reflected-link budget in linear units for the
// symmetric reference geometry (equal distances, equal elevations, peak
// array factor).
double reference_pl_db(double d, double theta, const RisConfig& ris) {
  const double lam = ris.wavelength_m();
  const double gt = std::pow(10.0, ris.gain_tx_dbi / 10.0);
  const double gr = std::pow(10.0, ris.gain_rx_dbi / 10.0);
  const double g = std::pow(10.0, ris.gain_cell_dbi / 10.0);
  const double f = std::pow(std::cos(theta), 3.0);
  const double num = 64.0 * std::pow(kPi, 3.0) * d * d * d * d;
  const double den = gt * gr * g * double(ris.rows) * ris.rows * double(ris.cols) * ris.cols *
                     ris.dx_m * ris.dy_m * lam * lam * f * f * ris.reflect_amp * ris.reflect_amp;
  return 10.0 * std::log10(num / den);
}

}  // namespace

TEST_SUITE("channel") {
  TEST_CASE("radiation_pattern piecewise definition") {
    CHECK(radiation_pattern(0.0) == doctest::Approx(1.0));
    CHECK(radiation_pattern(kPi / 3) == doctest::Approx(0.125));
    CHECK(radiation_pattern(2.0) == 0.0);
    CHECK(radiation_pattern(kPi) == 0.0);
    CHECK_THROWS_AS((void)radiation_pattern(-0.1), std::domain_error);
    CHECK_THROWS_AS((void)radiation_pattern(kPi + 0.1), std::domain_error);
  }

  TEST_CASE("psi_factor peaks at the specular-through-center geometry") {
    RisConfig ris;
    Rng rng(11);
    for (int i = 0; i < 200; ++i) {
      const double th = rng.uniform(0.0, kPi / 2);
      const double ph = rng.uniform(-kPi, kPi);
      const AngleSet a{th, ph, th, wrap_angle(ph + kPi)};
      CHECK(psi_factor(a, ris) == doctest::Approx(1.0).epsilon(1e-12));
    }
  }

  TEST_CASE("psi_factor resolves the grating-lobe singularity to 1") {
    RisConfig ris;
    ris.rows = 2;
    ris.cols = 2;
    ris.dx_m = ris.wavelength_m() / 2;
    ris.dy_m = ris.wavelength_m() / 2;
    // Both direction sums hit 2, putting each kernel argument at pi, a
    // removable singularity whose limit has magnitude 1.
    const AngleSet a{kPi / 2, 0.0, kPi / 2, 0.0};
    CHECK(psi_factor(a, ris) == doctest::Approx(1.0));
  }

  TEST_CASE("psi_factor bounded on random and near-singular inputs") {
    RisConfig ris;  // 100 x 102 panel
    Rng rng(2024);
    for (int i = 0; i < 100000; ++i) {
      const double v = psi_factor(random_angles(rng), ris);
      CHECK(std::isfinite(v));
      CHECK(v >= 0.0);
      CHECK(v <= 1.0);
    }
    // Constructed to land within 1e-8 of the vanishing sine: with this pitch
    // the kernel argument stays in (-1.05, 1.05), so its only singular point
    // is 0; steer the direction sum to a hair's width of it, straddling the
    // analytic-limit guard.
    for (int i = 0; i < 1000; ++i) {
      const double su = rng.uniform(-1e-8, 1e-8);
      // theta_t = theta_r = pi/2 and opposite-sign azimuths put the whole
      // direction sum on the x axis with magnitude 2*cos(phi).
      const double ph = std::acos(std::clamp(su / 2.0, -1.0, 1.0));
      const AngleSet a{kPi / 2, ph, kPi / 2, -ph};
      const double v = psi_factor(a, ris);
      CHECK(std::isfinite(v));
      CHECK(v >= 0.0);
      CHECK(v <= 1.0);
    }
  }

  TEST_CASE("ris_far_field_pl reference value and scaling") {
    RisConfig ris;
    const AngleSet sym{kPi / 6, 0.3, kPi / 6, wrap_angle(0.3 + kPi)};
    const double got = ris_far_field_pl(200.0, 200.0, sym, ris);
    CHECK(got == doctest::Approx(104.92179024960811).epsilon(1e-12));
    CHECK(got == doctest::Approx(reference_pl_db(200.0, kPi / 6, ris)).epsilon(1e-12));

    // d1^2 d2^2 scaling: doubling both distances adds 10*log10(16) dB.
    const double twice = ris_far_field_pl(400.0, 400.0, sym, ris);
    CHECK(twice - got == doctest::Approx(12.041199826559248).epsilon(1e-9));
  }

  TEST_CASE("ris_far_field_pl caps when the pattern vanishes") {
    RisConfig ris;
    const AngleSet behind{kPi / 2 + 0.1, 0.0, kPi / 6, 0.0};
    CHECK(ris_far_field_pl(200.0, 200.0, behind, ris) == kPathLossCapDb);
  }

  TEST_CASE("ris_far_field_pl near-field and domain guards") {
    RisConfig ris;
    const AngleSet sym{kPi / 6, 0.0, kPi / 6, kPi};
    const double dfr = fraunhofer_distance(ris);
    CHECK(dfr == doctest::Approx(68.06041798423095).epsilon(1e-12));
    CHECK_THROWS_AS((void)ris_far_field_pl(dfr, 200.0, sym, ris), near_field_error);
    CHECK_THROWS_AS((void)ris_far_field_pl(200.0, dfr - 1.0, sym, ris), near_field_error);
    CHECK_THROWS_AS((void)ris_far_field_pl(0.0, 200.0, sym, ris), std::domain_error);
    CHECK(is_far_field(dfr + 1e-9, dfr + 1e-9, ris));
    CHECK_FALSE(is_far_field(dfr, 200.0, ris));
  }

  TEST_CASE("ris_far_field_pl reciprocity under endpoint swap") {
    RisConfig ris;
    ris.gain_rx_dbi = ris.gain_tx_dbi;  // reciprocity requires equal end gains
    Rng rng(31);
    for (int i = 0; i < 10000; ++i) {
      const AngleSet a = random_angles(rng);
      const double d1 = rng.uniform(70.0, 2000.0);
      const double d2 = rng.uniform(70.0, 2000.0);
      const AngleSet swapped{a.theta_r, a.phi_r, a.theta_t, a.phi_t};
      const double fwd = ris_far_field_pl(d1, d2, a, ris);
      const double rev = ris_far_field_pl(d2, d1, swapped, ris);
      CHECK(std::abs(fwd - rev) < 1e-9);
    }
  }

  TEST_CASE("ris_far_field_pl monotone in each distance") {
    RisConfig ris;
    Rng rng(17);
    for (int i = 0; i < 2000; ++i) {
      const AngleSet a = random_angles(rng);
      const double d1 = rng.uniform(70.0, 1000.0);
      const double d2 = rng.uniform(70.0, 1000.0);
      const double base = ris_far_field_pl(d1, d2, a, ris);
      CHECK(ris_far_field_pl(d1 * 1.5, d2, a, ris) >= base);
      CHECK(ris_far_field_pl(d1, d2 * 1.5, a, ris) >= base);
    }
  }

  TEST_CASE("ris_far_field_pl_core agrees with the angle form") {
    RisConfig ris;
    Rng rng(5150);
    for (int i = 0; i < 1000; ++i) {
      const AngleSet a = random_angles(rng);
      const double d1 = rng.uniform(70.0, 1500.0);
      const double d2 = rng.uniform(70.0, 1500.0);
      const double via_core =
          ris_far_field_pl_core(d1, d2, radiation_pattern(a.theta_t),
                                radiation_pattern(a.theta_r), psi_factor(a, ris), ris);
      CHECK(via_core == ris_far_field_pl(d1, d2, a, ris));
    }
  }

  TEST_CASE("v2v_direct_pl line-of-sight value") {
    DirectChannelConfig cfg;
    Rng rng(1);
    const Vec3 tx{0.0, 0.0, 1.5};
    const Vec3 rx{0.0, 100.0, 1.5};
    const double pl = v2v_direct_pl(tx, rx, {}, cfg, rng);
    CHECK(pl == doctest::Approx(86.37940008672038).epsilon(1e-12));
  }

  TEST_CASE("blockage depends on the sightline height") {
    DirectChannelConfig cfg;
    const Vec3 tx{0.0, 0.0, 1.5};
    const Vec3 rx{0.0, 100.0, 1.5};
    const std::vector<Blocker> low{{{0.0, 50.0, 0.0}, 1.0}};
    const std::vector<Blocker> high{{{0.0, 50.0, 0.0}, 3.0}};
    const std::vector<Blocker> off_axis{{{10.0, 50.0, 0.0}, 3.0}};
    const std::vector<Blocker> outside{{{0.0, 150.0, 0.0}, 3.0}};
    CHECK_FALSE(v2v_is_blocked(tx, rx, low, cfg.lateral_halfwidth_m));
    CHECK(v2v_is_blocked(tx, rx, high, cfg.lateral_halfwidth_m));
    CHECK_FALSE(v2v_is_blocked(tx, rx, off_axis, cfg.lateral_halfwidth_m));
    CHECK_FALSE(v2v_is_blocked(tx, rx, outside, cfg.lateral_halfwidth_m));

    Rng rng_a(7);
    Rng rng_b(7);
    const double los = v2v_direct_pl(tx, rx, low, cfg, rng_a);
    const double nlos = v2v_direct_pl(tx, rx, high, cfg, rng_b);
    CHECK(los == doctest::Approx(86.37940008672038).epsilon(1e-12));
    CHECK(nlos >= los);  // extra loss is floored at zero
    // The unblocked call consumed no randomness: rng_a still sits at its origin.
    Rng fresh(7);
    CHECK(rng_a.next_u64() == fresh.next_u64());
  }

  TEST_CASE("blocked extra loss is reproducible for a fixed stream") {
    DirectChannelConfig cfg;
    const Vec3 tx{0.0, 0.0, 1.5};
    const Vec3 rx{0.0, 100.0, 1.5};
    const std::vector<Blocker> high{{{0.0, 50.0, 0.0}, 3.0}};
    Rng r1 = Rng::stream(42, 3);
    Rng r2 = Rng::stream(42, 3);
    CHECK(v2v_direct_pl(tx, rx, high, cfg, r1) == v2v_direct_pl(tx, rx, high, cfg, r2));
  }

  TEST_CASE("v2i_direct_pl urban-macro slope") {
    DirectChannelConfig cfg;
    const Vec3 tx{0.0, 0.0, 1.5};
    const double pl100 = v2i_direct_pl(tx, {0.0, 99.99887499366763, 1.5}, cfg);  // 3-D d != y gap
    const double exact100 = v2i_direct_pl(tx, {0.0, 100.0, 1.5}, cfg);
    CHECK(exact100 == doctest::Approx(85.97940008672037).epsilon(1e-12));
    CHECK(pl100 <= exact100);
    const double pl1000 = v2i_direct_pl(tx, {0.0, 1000.0, 1.5}, cfg);
    CHECK(pl1000 - exact100 == doctest::Approx(22.0).epsilon(1e-12));

    DirectChannelConfig twice = cfg;
    twice.carrier_hz *= 2.0;
    CHECK(v2i_direct_pl(tx, {0.0, 100.0, 1.5}, twice) - exact100 ==
          doctest::Approx(6.020599913279624).epsilon(1e-9));
  }

  TEST_CASE("combine_links coherent addition") {
    CHECK(combine_links(100.0, 100.0) ==
          doctest::Approx(100.0 - 6.020599913279624).epsilon(1e-12));
    CHECK(combine_links(90.0, 110.0) == doctest::Approx(89.17214629683549).epsilon(1e-12));
    // A capped input is an absent link and leaves the other unchanged, exactly.
    CHECK(combine_links(kPathLossCapDb, 123.456) == 123.456);
    CHECK(combine_links(77.7, kPathLossCapDb) == 77.7);
    CHECK(combine_links(kPathLossCapDb, kPathLossCapDb) == kPathLossCapDb);
  }

  TEST_CASE("combine_links never exceeds the better path") {
    Rng rng(12);
    for (int i = 0; i < 5000; ++i) {
      const double a = rng.uniform(40.0, 300.0);
      const double b = rng.uniform(40.0, 300.0);
      const double c = combine_links(a, b);
      CHECK(c <= std::min(a, b) + 1e-12);
      CHECK(c >= 0.0);
    }
  }

  TEST_CASE("snr_db arithmetic") {
    LinkBudget link;
    CHECK(snr_db(120.0, link) == doctest::Approx(34.28029995663982).epsilon(1e-12));
    CHECK(snr_db(117.0, link) - snr_db(120.0, link) == doctest::Approx(3.0).epsilon(1e-12));
    LinkBudget hot = link;
    hot.tx_power_dbm += 3.0;
    CHECK(snr_db(120.0, hot) - snr_db(120.0, link) == doctest::Approx(3.0).epsilon(1e-12));
  }

  TEST_CASE("rate_bps shannon mapping") {
    LinkBudget unit;
    unit.eta = 1.0;
    unit.eff_bandwidth_hz = 1.0;
    CHECK(rate_bps(0.0, unit) == doctest::Approx(1.0).epsilon(1e-12));

    LinkBudget link;  // defaults
    CHECK(rate_bps(34.28, link) == doctest::Approx(163157877.3353435).epsilon(1e-12));
    CHECK(rate_bps(-800.0, link) == doctest::Approx(0.0));

    // Strictly increasing in SNR; linear in eta and bandwidth.
    CHECK(rate_bps(20.0, link) < rate_bps(20.1, link));
    LinkBudget half = link;
    half.eta *= 0.5;
    CHECK(rate_bps(25.0, half) == doctest::Approx(0.5 * rate_bps(25.0, link)).epsilon(1e-12));
    LinkBudget wide = link;
    wide.eff_bandwidth_hz *= 3.0;
    CHECK(rate_bps(25.0, wide) == doctest::Approx(3.0 * rate_bps(25.0, link)).epsilon(1e-12));
  }
}
