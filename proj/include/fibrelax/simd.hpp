#pragma once

#include <cstddef>

// Runtime-dispatched arithmetic kernels. Every kernel has a scalar reference
// implementation and (on x86-64) an AVX2 variant; the active backend is chosen
// once at startup from CPU capabilities, overridable with FIBRELAX_SIMD=
// scalar|avx2|auto.
//
// Contract: the element-wise kernels (axpy2, upwind_diffusion_flux,
// flux_divergence_update) produce bit-identical results on every backend
// (same per-element expression, no FMA contraction). The reductions
// (reduce_sum, reduce_dot) use pairwise/lane accumulation, so backends may
// differ by a few ULP; both are far more accurate than a naive running sum.

namespace fibrelax::simd {

enum class Backend { scalar, avx2 };

double reduce_sum(const double* x, std::size_t n);
double reduce_dot(const double* x, const double* y, std::size_t n);

// y[i] += a*u[i] + b*v[i]
void axpy2(double* y, double a, const double* u, double b, const double* v, std::size_t n);

// flux[i] = min(vel[i],0)*rho_l[i] + max(vel[i],0)*rho_r[i] + d_over_h*(rho_r[i]-rho_l[i])
// (drift velocity is a potential gradient; mass flows downhill, so the donor
// cell for vel > 0 is the right one)
void upwind_diffusion_flux(double* flux, const double* rho_l, const double* rho_r,
                           const double* vel, double d_over_h, std::size_t n);

// rho[i] += scale * ((fe[i]-fw[i]) + (fn[i]-fs[i]))
void flux_divergence_update(double* rho, const double* fe, const double* fw,
                            const double* fn, const double* fs, double scale, std::size_t n);

const char* backend_name();
bool backend_available(Backend b);

// Force a specific backend (used by the equivalence tests and the
// FIBRELAX_SIMD environment override). Throws ConfigInvalid if unavailable.
void set_backend(Backend b);

} // namespace fibrelax::simd
