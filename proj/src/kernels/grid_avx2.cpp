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

// AVX2 kernel lane, 4 doubles wide. This translation unit must be compiled
// with -mavx2 -mfma; it is only entered after a runtime CPU check.
//
// The per-cell math avoids inverse trig entirely: the direction sums that
// feed the array factor are ratios of Cartesian components, the element
// pattern is a plain cube of cos(theta) = dz/d, and only sin/cos of the
// array-factor arguments (bounded by a few hundred radians) and one log10
// per cell remain. Those two primitives are vectorized below with a
// three-term Cody-Waite reduction and minimax polynomials; the remainder of
// each row falls back to the scalar per-cell routine.

#if !defined(__AVX2__) || !defined(__FMA__)
#error "grid_avx2.cpp must be compiled with -mavx2 -mfma"
#endif

#include <immintrin.h>

#include <cmath>
#include <vector>

#include "kernels_impl.hpp"

namespace drsim::kernels::impl {

namespace {

// ---------------- vector sin/cos ----------------

// Reduction constants: pi/2 split into three parts (fdlibm), valid while the
// quotient stays far below 2^20. Arguments here are at most a few thousand.
constexpr double kTwoOverPi = 0.63661977236758134308;
constexpr double kPio2A = 1.57079632673412561417e+00;
constexpr double kPio2B = 6.07710050650619224932e-11;
constexpr double kPio2C = 2.02226624879595063154e-21;
constexpr double kMagicShift = 6755399441055744.0;  // 1.5 * 2^52

// Minimax polynomials on |r| <= pi/4 (cephes, double precision).
constexpr double kS1 = -1.66666666666666307295e-1;
constexpr double kS2 = 8.33333333332211858878e-3;
constexpr double kS3 = -1.98412698295895385996e-4;
constexpr double kS4 = 2.75573136213857245213e-6;
constexpr double kS5 = -2.50507477628578072866e-8;
constexpr double kS6 = 1.58962301576546568060e-10;

constexpr double kC1 = 4.16666666666665929218e-2;
constexpr double kC2 = -1.38888888888730564116e-3;
constexpr double kC3 = 2.48015872888517179954e-5;
constexpr double kC4 = -2.75573141792967388112e-7;
constexpr double kC5 = 2.08757008419747316778e-9;
constexpr double kC6 = -1.13585365213876817300e-11;

inline __m256d flip_sign_where(__m256d v, __m256d mask) {
  return _mm256_xor_pd(v, _mm256_and_pd(mask, _mm256_set1_pd(-0.0)));
}

inline void sincos4(__m256d x, __m256d* s_out, __m256d* c_out) {
  const __m256d j = _mm256_round_pd(_mm256_mul_pd(x, _mm256_set1_pd(kTwoOverPi)),
                                    _MM_FROUND_TO_NEAREST_INT | _MM_FROUND_NO_EXC);

  // Quadrant bits of the integral quotient via the 2^52 shift trick; the low
  // two mantissa bits of (j + 1.5*2^52) equal j mod 4 in two's complement.
  const __m256i q = _mm256_castpd_si256(_mm256_add_pd(j, _mm256_set1_pd(kMagicShift)));
  const __m256i one64 = _mm256_set1_epi64x(1);
  const __m256i two64 = _mm256_set1_epi64x(2);
  const __m256d swap_m =
      _mm256_castsi256_pd(_mm256_cmpeq_epi64(_mm256_and_si256(q, one64), one64));
  const __m256d sin_neg =
      _mm256_castsi256_pd(_mm256_cmpeq_epi64(_mm256_and_si256(q, two64), two64));
  const __m256i qp1 = _mm256_add_epi64(q, one64);
  const __m256d cos_swap =
      _mm256_castsi256_pd(_mm256_cmpeq_epi64(_mm256_and_si256(qp1, one64), one64));
  const __m256d cos_neg =
      _mm256_castsi256_pd(_mm256_cmpeq_epi64(_mm256_and_si256(qp1, two64), two64));

  __m256d r = _mm256_fnmadd_pd(j, _mm256_set1_pd(kPio2A), x);
  r = _mm256_fnmadd_pd(j, _mm256_set1_pd(kPio2B), r);
  r = _mm256_fnmadd_pd(j, _mm256_set1_pd(kPio2C), r);
  const __m256d r2 = _mm256_mul_pd(r, r);

  __m256d ps = _mm256_set1_pd(kS6);
  ps = _mm256_fmadd_pd(ps, r2, _mm256_set1_pd(kS5));
  ps = _mm256_fmadd_pd(ps, r2, _mm256_set1_pd(kS4));
  ps = _mm256_fmadd_pd(ps, r2, _mm256_set1_pd(kS3));
  ps = _mm256_fmadd_pd(ps, r2, _mm256_set1_pd(kS2));
  ps = _mm256_fmadd_pd(ps, r2, _mm256_set1_pd(kS1));
  const __m256d sin_r = _mm256_fmadd_pd(_mm256_mul_pd(r, r2), ps, r);

  __m256d pc = _mm256_set1_pd(kC6);
  pc = _mm256_fmadd_pd(pc, r2, _mm256_set1_pd(kC5));
  pc = _mm256_fmadd_pd(pc, r2, _mm256_set1_pd(kC4));
  pc = _mm256_fmadd_pd(pc, r2, _mm256_set1_pd(kC3));
  pc = _mm256_fmadd_pd(pc, r2, _mm256_set1_pd(kC2));
  pc = _mm256_fmadd_pd(pc, r2, _mm256_set1_pd(kC1));
  const __m256d r4 = _mm256_mul_pd(r2, r2);
  const __m256d cos_r =
      _mm256_fmadd_pd(r4, pc, _mm256_fnmadd_pd(_mm256_set1_pd(0.5), r2, _mm256_set1_pd(1.0)));

  // sin selects [s, c, -s, -c] by quadrant; cos is the same table shifted.
  *s_out = flip_sign_where(_mm256_blendv_pd(sin_r, cos_r, swap_m), sin_neg);
  *c_out = flip_sign_where(_mm256_blendv_pd(sin_r, cos_r, cos_swap), cos_neg);
}

// ---------------- vector log10 ----------------

constexpr double kSqrt2 = 1.41421356237309504880;
constexpr double kLn2Hi = 6.93147180369123816490e-01;
constexpr double kLn2Lo = 1.90821492927058770002e-10;
constexpr double kInvLn10 = 0.434294481903251827651128918916605082;
constexpr double kExpShift = 4503599627370496.0;  // 2^52

// Assumes positive, normal input; callers guarantee this (capped cells are
// masked afterwards, so even inf comes out finite and clamps to the cap).
inline __m256d vlog10(__m256d x) {
  const __m256i bits = _mm256_castpd_si256(x);
  const __m256i expi = _mm256_srli_epi64(bits, 52);
  const __m256i mant = _mm256_or_si256(
      _mm256_and_si256(bits, _mm256_set1_epi64x(0x000FFFFFFFFFFFFFLL)),
      _mm256_set1_epi64x(0x3FF0000000000000LL));
  __m256d m = _mm256_castsi256_pd(mant);

  // Biased exponent to double, again via the 2^52 trick.
  const __m256i e_or = _mm256_or_si256(expi, _mm256_set1_epi64x(0x4330000000000000LL));
  __m256d e =
      _mm256_sub_pd(_mm256_castsi256_pd(e_or), _mm256_set1_pd(kExpShift + 1023.0));

  // Keep the mantissa in [sqrt(1/2), sqrt(2)) so |z| stays below 0.1716.
  const __m256d ge = _mm256_cmp_pd(m, _mm256_set1_pd(kSqrt2), _CMP_GE_OQ);
  m = _mm256_blendv_pd(m, _mm256_mul_pd(m, _mm256_set1_pd(0.5)), ge);
  e = _mm256_add_pd(e, _mm256_and_pd(ge, _mm256_set1_pd(1.0)));

  const __m256d one = _mm256_set1_pd(1.0);
  const __m256d z = _mm256_div_pd(_mm256_sub_pd(m, one), _mm256_add_pd(m, one));
  const __m256d z2 = _mm256_mul_pd(z, z);

  // ln(m) = 2 atanh(z); the truncated odd series is ample at |z| < 0.1716.
  __m256d p = _mm256_set1_pd(2.0 / 17.0);
  p = _mm256_fmadd_pd(p, z2, _mm256_set1_pd(2.0 / 15.0));
  p = _mm256_fmadd_pd(p, z2, _mm256_set1_pd(2.0 / 13.0));
  p = _mm256_fmadd_pd(p, z2, _mm256_set1_pd(2.0 / 11.0));
  p = _mm256_fmadd_pd(p, z2, _mm256_set1_pd(2.0 / 9.0));
  p = _mm256_fmadd_pd(p, z2, _mm256_set1_pd(2.0 / 7.0));
  p = _mm256_fmadd_pd(p, z2, _mm256_set1_pd(2.0 / 5.0));
  p = _mm256_fmadd_pd(p, z2, _mm256_set1_pd(2.0 / 3.0));
  p = _mm256_fmadd_pd(p, z2, _mm256_set1_pd(2.0));
  const __m256d ln_m = _mm256_mul_pd(z, p);

  const __m256d ln =
      _mm256_fmadd_pd(e, _mm256_set1_pd(kLn2Hi),
                      _mm256_fmadd_pd(e, _mm256_set1_pd(kLn2Lo), ln_m));
  return _mm256_mul_pd(ln, _mm256_set1_pd(kInvLn10));
}

// ---------------- shared pieces ----------------

constexpr double kSinGuard = 1e-9;  // must match the scalar channel guard

inline __m256d vabs(__m256d v) {
  return _mm256_andnot_pd(_mm256_set1_pd(-0.0), v);
}

// |sin(k u)/(k sin u)| with the analytic-limit blend, clamped to [0, 1].
inline __m256d dirichlet4(__m256d u, double k) {
  const __m256d ku = _mm256_mul_pd(u, _mm256_set1_pd(k));
  __m256d su, cu, sku, cku;
  sincos4(u, &su, &cu);
  sincos4(ku, &sku, &cku);
  const __m256d small =
      _mm256_cmp_pd(vabs(su), _mm256_set1_pd(kSinGuard), _CMP_LT_OQ);
  const __m256d main_ratio = _mm256_div_pd(sku, _mm256_mul_pd(_mm256_set1_pd(k), su));
  const __m256d limit_ratio = _mm256_div_pd(cku, cu);
  __m256d r = vabs(_mm256_blendv_pd(main_ratio, limit_ratio, small));
  return _mm256_min_pd(r, _mm256_set1_pd(1.0));
}

struct GridConsts {
  double lam, dfr, c0, kx, ky, cy, sy, cap;
};

GridConsts make_consts(const SurfaceJob& job) {
  const RisConfig& ris = job.ris;
  const double lam = ris.wavelength_m();
  const double m = static_cast<double>(ris.rows);
  const double n = static_cast<double>(ris.cols);
  const double gains = std::pow(10.0, ris.gain_tx_dbi / 10.0) *
                       std::pow(10.0, ris.gain_rx_dbi / 10.0) *
                       std::pow(10.0, ris.gain_cell_dbi / 10.0);
  GridConsts c{};
  c.lam = lam;
  c.dfr = fraunhofer_distance(ris);
  c.c0 = 64.0 * kPi * kPi * kPi /
         (gains * m * m * n * n * ris.dx_m * ris.dy_m * lam * lam * ris.reflect_amp *
          ris.reflect_amp);
  c.kx = kPi * ris.dx_m / lam;
  c.ky = kPi * ris.dy_m / lam;
  c.cy = std::cos(job.grid.yaw);
  c.sy = std::sin(job.grid.yaw);
  c.cap = job.pl_cap_db;
  return c;
}

// Scalar per-cell fallback for row remainders: identical to the reference
// kernel so tail cells match the scalar backend exactly.
inline void scalar_cell(const SurfaceJob& job, double x, double y, double* pl,
                        std::uint8_t* nf) {
  const Pose pose{{x, y, job.grid.z}, job.grid.yaw};
  const double d1 = distance(pose.position, job.node_a);
  const double d2 = distance(pose.position, job.node_b);
  if (!is_far_field(d1, d2, job.ris)) {
    *pl = job.pl_cap_db;
    *nf = 1;
    return;
  }
  const AngleSet angles = angles_to_pair(pose, job.node_a, job.node_b);
  *pl = ris_far_field_pl(d1, d2, angles, job.ris, job.pl_cap_db);
  *nf = 0;
}

}  // namespace

void grid_avx2(const SurfaceJob& job, std::span<double> out_pl_db,
               std::span<std::uint8_t> out_near_field) {
  const GridSpec& g = job.grid;
  const GridConsts c = make_consts(job);
  const std::size_t total = static_cast<std::size_t>(g.nx) * static_cast<std::size_t>(g.ny);

  std::vector<double> xs(total), ys(total);
  std::size_t idx = 0;
  for (int j = 0; j < g.ny; ++j) {
    const double y = g.y0 + j * g.dy;
    for (int i = 0; i < g.nx; ++i, ++idx) {
      xs[idx] = g.x0 + i * g.dx;
      ys[idx] = y;
    }
  }

  const __m256d az = _mm256_set1_pd(job.node_a.z);
  const __m256d bz = _mm256_set1_pd(job.node_b.z);
  const __m256d pz = _mm256_set1_pd(g.z);
  const __m256d zero = _mm256_setzero_pd();
  const __m256d cap = _mm256_set1_pd(c.cap);
  const __m256d dfr = _mm256_set1_pd(c.dfr);
  const __m256d vcy = _mm256_set1_pd(c.cy);
  const __m256d vsy = _mm256_set1_pd(c.sy);

  std::size_t i = 0;
  for (; i + 4 <= total; i += 4) {
    const __m256d px = _mm256_loadu_pd(&xs[i]);
    const __m256d py = _mm256_loadu_pd(&ys[i]);

    const __m256d wax = _mm256_sub_pd(_mm256_set1_pd(job.node_a.x), px);
    const __m256d way = _mm256_sub_pd(_mm256_set1_pd(job.node_a.y), py);
    const __m256d waz = _mm256_sub_pd(az, pz);
    const __m256d wbx = _mm256_sub_pd(_mm256_set1_pd(job.node_b.x), px);
    const __m256d wby = _mm256_sub_pd(_mm256_set1_pd(job.node_b.y), py);
    const __m256d wbz = _mm256_sub_pd(bz, pz);

    const __m256d d1sq = _mm256_fmadd_pd(
        wax, wax, _mm256_fmadd_pd(way, way, _mm256_mul_pd(waz, waz)));
    const __m256d d2sq = _mm256_fmadd_pd(
        wbx, wbx, _mm256_fmadd_pd(wby, wby, _mm256_mul_pd(wbz, wbz)));
    const __m256d d1 = _mm256_sqrt_pd(d1sq);
    const __m256d d2 = _mm256_sqrt_pd(d2sq);

    const __m256d near = _mm256_or_pd(_mm256_cmp_pd(d1, dfr, _CMP_LE_OQ),
                                      _mm256_cmp_pd(d2, dfr, _CMP_LE_OQ));

    // Horizontal displacement rotated into the panel frame.
    const __m256d hax = _mm256_fmadd_pd(vcy, wax, _mm256_mul_pd(vsy, way));
    const __m256d hay = _mm256_fnmadd_pd(vsy, wax, _mm256_mul_pd(vcy, way));
    const __m256d hbx = _mm256_fmadd_pd(vcy, wbx, _mm256_mul_pd(vsy, wby));
    const __m256d hby = _mm256_fnmadd_pd(vsy, wbx, _mm256_mul_pd(vcy, wby));

    // Direction sums: sin(theta)cos(phi) = hx/d, sin(theta)sin(phi) = hy/d.
    const __m256d su = _mm256_add_pd(_mm256_div_pd(hax, d1), _mm256_div_pd(hbx, d2));
    const __m256d sv = _mm256_add_pd(_mm256_div_pd(hay, d1), _mm256_div_pd(hby, d2));

    // Element pattern cos^3(theta), zero behind the panel plane.
    const __m256d ct1 = _mm256_div_pd(_mm256_sub_pd(pz, az), d1);
    const __m256d ct2 = _mm256_div_pd(_mm256_sub_pd(pz, bz), d2);
    const __m256d f1 = _mm256_and_pd(
        _mm256_mul_pd(_mm256_mul_pd(ct1, ct1), ct1), _mm256_cmp_pd(ct1, zero, _CMP_GE_OQ));
    const __m256d f2 = _mm256_and_pd(
        _mm256_mul_pd(_mm256_mul_pd(ct2, ct2), ct2), _mm256_cmp_pd(ct2, zero, _CMP_GE_OQ));

    const __m256d fx = dirichlet4(_mm256_mul_pd(_mm256_set1_pd(c.kx), su),
                                  static_cast<double>(job.ris.rows));
    const __m256d fy = dirichlet4(_mm256_mul_pd(_mm256_set1_pd(c.ky), sv),
                                  static_cast<double>(job.ris.cols));
    const __m256d psi = _mm256_mul_pd(fx, fy);

    const __m256d denom =
        _mm256_mul_pd(_mm256_mul_pd(f1, f2), _mm256_mul_pd(psi, psi));
    const __m256d dead = _mm256_cmp_pd(denom, zero, _CMP_EQ_OQ);

    const __m256d pl_lin = _mm256_div_pd(
        _mm256_mul_pd(_mm256_set1_pd(c.c0), _mm256_mul_pd(d1sq, d2sq)), denom);
    __m256d db = _mm256_mul_pd(_mm256_set1_pd(10.0), vlog10(pl_lin));
    db = _mm256_max_pd(db, zero);
    db = _mm256_min_pd(db, cap);
    db = _mm256_blendv_pd(db, cap, _mm256_or_pd(dead, near));
    _mm256_storeu_pd(&out_pl_db[i], db);

    const int bits = _mm256_movemask_pd(near);
    out_near_field[i + 0] = static_cast<std::uint8_t>(bits & 1);
    out_near_field[i + 1] = static_cast<std::uint8_t>((bits >> 1) & 1);
    out_near_field[i + 2] = static_cast<std::uint8_t>((bits >> 2) & 1);
    out_near_field[i + 3] = static_cast<std::uint8_t>((bits >> 3) & 1);
  }
  for (; i < total; ++i) {
    scalar_cell(job, xs[i], ys[i], &out_pl_db[i], &out_near_field[i]);
  }
}

void psi_avx2(std::span<const double> theta_t, std::span<const double> phi_t,
              std::span<const double> theta_r, std::span<const double> phi_r,
              const RisConfig& ris, std::span<double> out_abs_psi) {
  const std::size_t n = theta_t.size();
  const double lam = ris.wavelength_m();
  const double kx = kPi * ris.dx_m / lam;
  const double ky = kPi * ris.dy_m / lam;

  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    __m256d st, ct, sr, cr, spt, cpt, spr, cpr;
    sincos4(_mm256_loadu_pd(&theta_t[i]), &st, &ct);
    sincos4(_mm256_loadu_pd(&theta_r[i]), &sr, &cr);
    sincos4(_mm256_loadu_pd(&phi_t[i]), &spt, &cpt);
    sincos4(_mm256_loadu_pd(&phi_r[i]), &spr, &cpr);

    const __m256d su = _mm256_fmadd_pd(st, cpt, _mm256_mul_pd(sr, cpr));
    const __m256d sv = _mm256_fmadd_pd(st, spt, _mm256_mul_pd(sr, spr));

    const __m256d fx = dirichlet4(_mm256_mul_pd(_mm256_set1_pd(kx), su),
                                  static_cast<double>(ris.rows));
    const __m256d fy = dirichlet4(_mm256_mul_pd(_mm256_set1_pd(ky), sv),
                                  static_cast<double>(ris.cols));
    _mm256_storeu_pd(&out_abs_psi[i], _mm256_mul_pd(fx, fy));
  }
  for (; i < n; ++i) {
    out_abs_psi[i] = psi_factor({theta_t[i], phi_t[i], theta_r[i], phi_r[i]}, ris);
  }
}

namespace vecmath_hooks {

void vsin4(const double in[4], double out[4]) {
  __m256d s, c;
  sincos4(_mm256_loadu_pd(in), &s, &c);
  _mm256_storeu_pd(out, s);
}

void vcos4(const double in[4], double out[4]) {
  __m256d s, c;
  sincos4(_mm256_loadu_pd(in), &s, &c);
  _mm256_storeu_pd(out, c);
}

void vlog10_4(const double in[4], double out[4]) {
  _mm256_storeu_pd(out, vlog10(_mm256_loadu_pd(in)));
}

}  // namespace vecmath_hooks

}  // namespace drsim::kernels::impl

namespace drsim::kernels::detail {

void vsin4_avx2(const double in[4], double out[4]) { impl::vecmath_hooks::vsin4(in, out); }
void vcos4_avx2(const double in[4], double out[4]) { impl::vecmath_hooks::vcos4(in, out); }
void vlog10_4_avx2(const double in[4], double out[4]) { impl::vecmath_hooks::vlog10_4(in, out); }

}  // namespace drsim::kernels::detail
