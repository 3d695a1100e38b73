#pragma once

#include <cstddef>

namespace fibrelax::simd::detail {

struct KernelTable {
    double (*reduce_sum)(const double*, std::size_t);
    double (*reduce_dot)(const double*, const double*, std::size_t);
    void (*axpy2)(double*, double, const double*, double, const double*, std::size_t);
    void (*upwind_diffusion_flux)(double*, const double*, const double*, const double*, double,
                                  std::size_t);
    void (*flux_divergence_update)(double*, const double*, const double*, const double*,
                                   const double*, double, std::size_t);
    const char* name;
};

const KernelTable& scalar_table();
const KernelTable* avx2_table(); // nullptr when not compiled in

} // namespace fibrelax::simd::detail
