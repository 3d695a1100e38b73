#include "fibrelax/simd.hpp"

#include <atomic>
#include <cstdlib>
#include <string>

#include "fibrelax/errors.hpp"
#include "kernel_table.hpp"

namespace fibrelax::simd {
namespace {

using detail::KernelTable;

bool cpu_has_avx2() {
#if defined(__x86_64__) || defined(_M_X64)
    __builtin_cpu_init();
    return __builtin_cpu_supports("avx2");
#else
    return false;
#endif
}

const KernelTable* pick_initial() {
    const char* env = std::getenv("FIBRELAX_SIMD");
    const std::string want = env ? env : "auto";
    if (want == "scalar") return &detail::scalar_table();
    if (want == "avx2") {
        const KernelTable* t = detail::avx2_table();
        if (!t || !cpu_has_avx2())
            throw ConfigInvalid("FIBRELAX_SIMD", "avx2 backend not available on this host");
        return t;
    }
    if (want != "auto" && want != "")
        throw ConfigInvalid("FIBRELAX_SIMD", "unknown backend '" + want + "'");
    const KernelTable* t = detail::avx2_table();
    return (t && cpu_has_avx2()) ? t : &detail::scalar_table();
}

std::atomic<const KernelTable*> g_active{nullptr};

const KernelTable& active() {
    const KernelTable* t = g_active.load(std::memory_order_acquire);
    if (!t) {
        t = pick_initial();
        g_active.store(t, std::memory_order_release);
    }
    return *t;
}

} // namespace

double reduce_sum(const double* x, std::size_t n) {
    return active().reduce_sum(x, n);
}
double reduce_dot(const double* x, const double* y, std::size_t n) {
    return active().reduce_dot(x, y, n);
}
void axpy2(double* y, double a, const double* u, double b, const double* v, std::size_t n) {
    active().axpy2(y, a, u, b, v, n);
}
void upwind_diffusion_flux(double* flux, const double* rho_l, const double* rho_r,
                           const double* vel, double d_over_h, std::size_t n) {
    active().upwind_diffusion_flux(flux, rho_l, rho_r, vel, d_over_h, n);
}
void flux_divergence_update(double* rho, const double* fe, const double* fw, const double* fn,
                            const double* fs, double scale, std::size_t n) {
    active().flux_divergence_update(rho, fe, fw, fn, fs, scale, n);
}

const char* backend_name() {
    return active().name;
}

bool backend_available(Backend b) {
    if (b == Backend::scalar) return true;
    return detail::avx2_table() != nullptr && cpu_has_avx2();
}

void set_backend(Backend b) {
    if (b == Backend::scalar) {
        g_active.store(&detail::scalar_table(), std::memory_order_release);
        return;
    }
    if (!backend_available(b))
        throw ConfigInvalid("simd backend", "avx2 backend not available on this host");
    g_active.store(detail::avx2_table(), std::memory_order_release);
}

} // namespace fibrelax::simd
