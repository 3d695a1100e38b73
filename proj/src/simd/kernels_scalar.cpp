#include "kernel_table.hpp"

#include <algorithm>

// Scalar reference kernels. The reductions use recursive pairwise summation
// so the rounding error grows like log(n) rather than n.

namespace fibrelax::simd::detail {
namespace {

constexpr std::size_t kPairwiseBase = 32;

double sum_range(const double* x, std::size_t n) {
    if (n <= kPairwiseBase) {
        double s = 0.0;
        for (std::size_t i = 0; i < n; ++i) s += x[i];
        return s;
    }
    const std::size_t h = n / 2;
    return sum_range(x, h) + sum_range(x + h, n - h);
}

double dot_range(const double* x, const double* y, std::size_t n) {
    if (n <= kPairwiseBase) {
        double s = 0.0;
        for (std::size_t i = 0; i < n; ++i) s += x[i] * y[i];
        return s;
    }
    const std::size_t h = n / 2;
    return dot_range(x, y, h) + dot_range(x + h, y + h, n - h);
}

double reduce_sum_scalar(const double* x, std::size_t n) {
    return sum_range(x, n);
}

double reduce_dot_scalar(const double* x, const double* y, std::size_t n) {
    return dot_range(x, y, n);
}

void axpy2_scalar(double* y, double a, const double* u, double b, const double* v,
                  std::size_t n) {
    for (std::size_t i = 0; i < n; ++i) y[i] += a * u[i] + b * v[i];
}

void upwind_diffusion_flux_scalar(double* flux, const double* rho_l, const double* rho_r,
                                  const double* vel, double d_over_h, std::size_t n) {
    for (std::size_t i = 0; i < n; ++i) {
        const double vp = std::max(vel[i], 0.0);
        const double vm = std::min(vel[i], 0.0);
        flux[i] = vm * rho_l[i] + vp * rho_r[i] + d_over_h * (rho_r[i] - rho_l[i]);
    }
}

void flux_divergence_update_scalar(double* rho, const double* fe, const double* fw,
                                   const double* fn, const double* fs, double scale,
                                   std::size_t n) {
    for (std::size_t i = 0; i < n; ++i) rho[i] += scale * ((fe[i] - fw[i]) + (fn[i] - fs[i]));
}

} // namespace

const KernelTable& scalar_table() {
    static const KernelTable t = {
        reduce_sum_scalar,     reduce_dot_scalar,           axpy2_scalar,
        upwind_diffusion_flux_scalar, flux_divergence_update_scalar, "scalar",
    };
    return t;
}

} // namespace fibrelax::simd::detail
