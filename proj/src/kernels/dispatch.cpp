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

#include <atomic>
#include <stdexcept>

#include "drsim/kernels/pathloss_grid.hpp"
#include "kernels_impl.hpp"

namespace drsim::kernels {

namespace {

// Backend choice is process-global. Sweep replicas run on worker threads but
// the backend is fixed before they start; reads after that are lock-free.
std::atomic<int> g_forced{-1};  // -1 auto, otherwise static_cast<int>(Backend)

Backend resolve() {
  const int forced = g_forced.load(std::memory_order_relaxed);
  if (forced >= 0) return static_cast<Backend>(forced);
  return preferred_backend();
}

}  // namespace

bool cpu_supports_avx2() {
#if DRSIM_HAVE_AVX2_TU && (defined(__x86_64__) || defined(__i386__))
  return __builtin_cpu_supports("avx2") && __builtin_cpu_supports("fma");
#else
  return false;
#endif
}

Backend preferred_backend() {
  return cpu_supports_avx2() ? Backend::avx2 : Backend::scalar;
}

Backend active_backend() { return resolve(); }

void force_backend(Backend b) {
  if (b == Backend::avx2 && !cpu_supports_avx2())
    throw std::runtime_error("kernels: avx2 backend not available on this host");
  g_forced.store(static_cast<int>(b), std::memory_order_relaxed);
}

void reset_backend() { g_forced.store(-1, std::memory_order_relaxed); }

std::string backend_name(Backend b) {
  return b == Backend::avx2 ? "avx2" : "scalar";
}

void ris_pathloss_grid(const SurfaceJob& job, std::span<double> out_pl_db,
                       std::span<std::uint8_t> out_near_field) {
  const std::size_t cells =
      static_cast<std::size_t>(job.grid.nx) * static_cast<std::size_t>(job.grid.ny);
  if (job.grid.nx < 1 || job.grid.ny < 1)
    throw std::invalid_argument("ris_pathloss_grid: grid dimensions must be positive");
  if (out_pl_db.size() != cells || out_near_field.size() != cells)
    throw std::invalid_argument("ris_pathloss_grid: output span size mismatch");

#if DRSIM_HAVE_AVX2_TU
  if (resolve() == Backend::avx2) {
    impl::grid_avx2(job, out_pl_db, out_near_field);
    return;
  }
#endif
  impl::grid_scalar(job, out_pl_db, out_near_field);
}

void psi_batch(std::span<const double> theta_t, std::span<const double> phi_t,
               std::span<const double> theta_r, std::span<const double> phi_r,
               const RisConfig& ris, std::span<double> out_abs_psi) {
  const std::size_t n = theta_t.size();
  if (phi_t.size() != n || theta_r.size() != n || phi_r.size() != n || out_abs_psi.size() != n)
    throw std::invalid_argument("psi_batch: span size mismatch");

#if DRSIM_HAVE_AVX2_TU
  if (resolve() == Backend::avx2) {
    impl::psi_avx2(theta_t, phi_t, theta_r, phi_r, ris, out_abs_psi);
    return;
  }
#endif
  impl::psi_scalar(theta_t, phi_t, theta_r, phi_r, ris, out_abs_psi);
}

#if !DRSIM_HAVE_AVX2_TU
namespace detail {
void vsin4_avx2(const double[4], double[4]) {
  throw std::runtime_error("kernels: avx2 lane not compiled in");
}
void vcos4_avx2(const double[4], double[4]) {
  throw std::runtime_error("kernels: avx2 lane not compiled in");
}
void vlog10_4_avx2(const double[4], double[4]) {
  throw std::runtime_error("kernels: avx2 lane not compiled in");
}
}  // namespace detail
#endif

}  // namespace drsim::kernels
