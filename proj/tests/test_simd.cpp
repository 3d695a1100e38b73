#include <doctest.h>

#include <cmath>
#include <random>
#include <vector>

#include "fibrelax/simd.hpp"

using namespace fibrelax;

namespace {

struct BackendGuard {
    ~BackendGuard() {
        if (simd::backend_available(simd::Backend::avx2))
            simd::set_backend(simd::Backend::avx2);
        else
            simd::set_backend(simd::Backend::scalar);
    }
};

std::vector<double> random_vec(std::mt19937_64& gen, std::size_t n, double lo, double hi) {
    std::uniform_real_distribution<double> U(lo, hi);
    std::vector<double> v(n);
    for (double& x : v) x = U(gen);
    return v;
}

} // namespace

TEST_CASE("simd backends agree" * doctest::skip(false)) {
    if (!simd::backend_available(simd::Backend::avx2)) {
        MESSAGE("avx2 unavailable on this host; scalar-only");
        return;
    }
    BackendGuard guard;
    std::mt19937_64 gen(123);
    for (std::size_t n : {1ul, 3ul, 4ul, 17ul, 256ul, 1000ul, 4097ul, 100000ul}) {
        auto x = random_vec(gen, n, -3.0, 5.0);
        auto y = random_vec(gen, n, -2.0, 2.0);
        auto v = random_vec(gen, n, -1.0, 1.0);

        simd::set_backend(simd::Backend::scalar);
        const double s_sum = simd::reduce_sum(x.data(), n);
        const double s_dot = simd::reduce_dot(x.data(), y.data(), n);
        std::vector<double> s_axpy = x;
        simd::axpy2(s_axpy.data(), 0.7, y.data(), -1.3, v.data(), n);
        std::vector<double> s_flux(n - (n > 1 ? 1 : 0));
        if (n > 1) simd::upwind_diffusion_flux(s_flux.data(), x.data(), x.data() + 1, v.data(),
                                               0.37, n - 1);
        std::vector<double> s_upd = y;
        simd::flux_divergence_update(s_upd.data(), x.data(), y.data(), v.data(), x.data(), 0.11,
                                     n);

        simd::set_backend(simd::Backend::avx2);
        const double a_sum = simd::reduce_sum(x.data(), n);
        const double a_dot = simd::reduce_dot(x.data(), y.data(), n);
        std::vector<double> a_axpy = x;
        simd::axpy2(a_axpy.data(), 0.7, y.data(), -1.3, v.data(), n);
        std::vector<double> a_flux(n - (n > 1 ? 1 : 0));
        if (n > 1) simd::upwind_diffusion_flux(a_flux.data(), x.data(), x.data() + 1, v.data(),
                                               0.37, n - 1);
        std::vector<double> a_upd = y;
        simd::flux_divergence_update(a_upd.data(), x.data(), y.data(), v.data(), x.data(), 0.11,
                                     n);

        // reductions: reassociated, a few ULP apart
        CHECK(std::abs(s_sum - a_sum) <= 1e-13 * std::max(1.0, std::abs(s_sum)));
        CHECK(std::abs(s_dot - a_dot) <= 1e-13 * std::max(1.0, std::abs(s_dot)));
        // element-wise kernels: identical rounding, bit-equal values
        for (std::size_t i = 0; i < n; ++i) {
            CHECK(s_axpy[i] == a_axpy[i]);
            CHECK(s_upd[i] == a_upd[i]);
        }
        for (std::size_t i = 0; i + 1 < n; ++i) CHECK(s_flux[i] == a_flux[i]);
    }
}

TEST_CASE("reductions are accurate on ill-scaled data") {
    BackendGuard guard;
    // pairwise summation should do far better than a naive running sum here
    std::vector<double> v;
    for (int k = 0; k < 4096; ++k) v.push_back(std::exp(0.005 * k));
    long double exact = 0.0L;
    for (double x : v) exact += x;
    for (auto b : {simd::Backend::scalar, simd::Backend::avx2}) {
        if (!simd::backend_available(b)) continue;
        simd::set_backend(b);
        const double got = simd::reduce_sum(v.data(), v.size());
        CHECK(std::abs(got - static_cast<double>(exact)) <
              1e-13 * static_cast<double>(exact));
    }
}

TEST_CASE("upwind flux picks the donor cell from the drift direction") {
    BackendGuard guard;
    const double rho_l[4] = {1.0, 1.0, 2.0, 2.0};
    const double rho_r[4] = {2.0, 2.0, 1.0, 1.0};
    const double vel[4] = {1.0, -1.0, 1.0, -1.0};
    double flux[4];
    simd::upwind_diffusion_flux(flux, rho_l, rho_r, vel, 0.0, 4);
    // positive velocity (potential increases rightward): mass drifts left,
    // donor is the right cell
    CHECK(flux[0] == doctest::Approx(2.0));
    CHECK(flux[1] == doctest::Approx(-1.0));
    CHECK(flux[2] == doctest::Approx(1.0));
    CHECK(flux[3] == doctest::Approx(-2.0));
}
