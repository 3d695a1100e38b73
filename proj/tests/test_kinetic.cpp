#include <doctest.h>

#include <cmath>
#include <random>

#include "fibrelax/ibm.hpp"
#include "fibrelax/kinetic.hpp"
#include "support/bessel.hpp"

using namespace fibrelax;

TEST_CASE("partition function against the Bessel series oracle") {
    CHECK(partition_function(0.0) == doctest::Approx(1.0).epsilon(1e-14));
    CHECK(std::abs(partition_function(0.0, 1)) < 1e-15);
    CHECK(std::abs(partition_function(0.0, 3)) < 1e-15);
    CHECK(partition_function(1.0) == doctest::Approx(1.26607).epsilon(1e-5));
    CHECK(partition_function(1.0, 1) == doctest::Approx(0.56516).epsilon(1e-5));
    for (double r : {0.1, 0.5, 1.0, 2.0, 5.0, 10.0, 20.0, 50.0}) {
        const double i0 = oracle::bessel_i0(r);
        const double i1 = oracle::bessel_i1(r);
        CHECK(std::abs(partition_function(r) - i0) < 1e-12 * std::max(1.0, i0));
        CHECK(std::abs(partition_function(r, 1) - i1) < 1e-12 * std::max(1.0, i1));
    }
    CHECK_THROWS_AS((void)partition_function(-0.5), NegativeConcentration);
}

TEST_CASE("derivative monotonicity Z^(p)(r) >= Z^(p)(0) >= 0 and Z <= 2 Z''") {
    for (double r = 0.25; r <= 32.0; r *= 2.0) {
        for (int p = 0; p <= 4; ++p) {
            const double zp = partition_function(r, p);
            const double z0 = partition_function(0.0, p);
            CHECK(zp >= z0 - 1e-12);
            CHECK(z0 >= -1e-15);
        }
        CHECK(partition_function(r) <= 2.0 * partition_function(r, 2) * (1 + 1e-13));
    }
}

TEST_CASE("order parameter c(r)") {
    CHECK(vm_order_parameter(0.0) == doctest::Approx(0.0).epsilon(1e-14));
    CHECK(vm_order_parameter(1.0) ==
          doctest::Approx(oracle::bessel_i1(1.0) / oracle::bessel_i0(1.0)).epsilon(1e-12));
    CHECK(vm_order_parameter(1.0) == doctest::Approx(0.44639).epsilon(1e-5));
    // c(r)/r <= 1/2 across the range; c increasing
    double prev = 0.0;
    for (double r = 0.01; r <= 100.0; r *= 1.35) {
        const double c = vm_order_parameter(r);
        CHECK(c / r <= 0.5 + 1e-14);
        CHECK(c > prev);
        prev = c;
    }
}

TEST_CASE("concentration inversion by bisection") {
    for (double r : {0.2, 1.0, 3.0, 17.0}) {
        const double eta = vm_order_parameter(r);
        CHECK(vm_concentration_from_order(eta) == doctest::Approx(r).epsilon(1e-8));
    }
    CHECK(vm_concentration_from_order(0.0) == 0.0);
    CHECK(vm_concentration_from_order(-0.3) == 0.0);
    CHECK_THROWS_AS((void)vm_concentration_from_order(0.9999999), DomainError);
}

TEST_CASE("coefficient bundle at r = 1") {
    const Coefficients co = coefficients_from_r(1.0, 1.0, 1.0);
    const double Z = oracle::bessel_i0(1.0);
    CHECK(co.alpha1 == doctest::Approx(1.0 - 1.0 / (Z * Z)).epsilon(1e-10));
    CHECK(co.alpha1 == doctest::Approx(0.37614).epsilon(1e-4));
    CHECK(co.alpha2 > 0.0);
    CHECK(co.alpha3 <= 0.0);
    CHECK(co.alpha4 > 0.0);
    CHECK(co.alpha5 == doctest::Approx(1.0 / co.alpha1));
    CHECK_THROWS_AS((void)coefficients_from_r(1.0, 1.0, 0.0), IsotropicSingular);
    CHECK_THROWS_AS((void)coefficients_from_r(1.0, 1.0, -1.0), NegativeConcentration);
}

TEST_CASE("full coefficient bundle wires the rate constants") {
    const Coefficients co = coefficients(0.5, 1.5, 0.8, 2.0, 0.7, 3.0, 12.0);
    CHECK(co.r == doctest::Approx(0.8 * 2.0 * 1.5 * 1.5 * 0.7 / (4.0 * 0.5)));
    CHECK(co.C1 == doctest::Approx(2.0 * 1.5 * 1.5 * 3.0 / (2.0 * 12.0)));
    CHECK(co.C2 == doctest::Approx(2.0 * std::pow(1.5, 4) * 3.0 / (48.0 * 12.0)));
}

TEST_CASE("equilibrium density: normalization and peak value") {
    AngularGrid g(256);
    for (double r : {0.5, 1.0, 5.0}) {
        const AngularField f = vm_field(g, 0.4, r);
        CHECK(grid_mean(f) == doctest::Approx(1.0).epsilon(1e-12));
    }
    CHECK(vm_pdf(0.0, 0.0, 0.0) == doctest::Approx(1.0));
    CHECK(vm_pdf(0.7, 0.7, 1.0) ==
          doctest::Approx(std::exp(1.0) / oracle::bessel_i0(1.0)).epsilon(1e-10));
    CHECK(vm_pdf(0.7, 0.7, 1.0) == doctest::Approx(2.14702).epsilon(1e-5));
}

TEST_CASE("rejection sampler reproduces the first moments") {
    CounterRng base(2024);
    StreamRng rng(base, 1);
    const double r = 2.0, th0 = 0.35;
    const auto sample = vm_sample(rng, th0, r, 200000);
    const OrderParameters op = order_parameters(sample);
    CHECK(op.eta == doctest::Approx(vm_order_parameter(r)).epsilon(0.01));
    CHECK(op.theta_mean == doctest::Approx(th0).epsilon(0.02));
}

TEST_CASE("mean-field potential: moment decomposition") {
    AngularGrid g(256);
    const double C1 = 1.7;

    // uniform density rho: Phi == C1 rho / 2
    AngularField f(g, 2.5);
    AngularField phi = mean_field_potential(f, C1);
    for (int j = 0; j < g.n; ++j) CHECK(phi.v[j] == doctest::Approx(C1 * 2.5 / 2).epsilon(1e-13));

    // equilibrium density: Phi = (C1/2)(1 - c(r) cos 2(t - t0))
    const double r = 1.0, th0 = -0.3;
    const AngularField m = vm_field(g, th0, r);
    phi = mean_field_potential(m, C1);
    const double c = vm_order_parameter(r);
    for (int j = 0; j < g.n; ++j) {
        const double expect = 0.5 * C1 * (1.0 - c * std::cos(2.0 * (g.node(j) - th0)));
        CHECK(phi.v[j] == doctest::Approx(expect).epsilon(1e-10));
    }
    // max-min gap equals C1 * eta_f
    double lo = 1e300, hi = -1e300;
    for (double v : phi.v) {
        lo = std::min(lo, v);
        hi = std::max(hi, v);
    }
    CHECK(hi - lo == doctest::Approx(C1 * c).epsilon(1e-6));
}

TEST_CASE("collision operator: conservation and equilibrium annihilation") {
    const double d = 1.0, xi = 1.0;

    // constant density: Q == 0 exactly
    {
        AngularGrid g(128);
        AngularField f(g, 0.7);
        const AngularField q = collision_operator(f, d, xi, 2.0);
        for (double v : q.v) CHECK(v == 0.0);
    }

    // random positive density: discrete mean of Q vanishes
    {
        AngularGrid g(256);
        AngularField f(g);
        std::mt19937_64 gen(3);
        std::uniform_real_distribution<double> U(0.1, 2.0);
        for (double& v : f.v) v = U(gen);
        const AngularField q = collision_operator(f, d, xi, 2.0);
        double scale = 0.0;
        for (double v : q.v) scale = std::max(scale, std::abs(v));
        CHECK(std::abs(grid_mean(q)) < 1e-13 * scale);
        AngularField bad = f;
        bad.v[3] = 0.0;
        CHECK_THROWS_AS((void)collision_operator(bad, d, xi, 2.0), NonPositiveDensity);
    }

    // equilibrium with the consistent concentration: residual -> 0 at 2nd order
    for (double r : {1.0, 5.0}) {
        const double c = vm_order_parameter(r, 2048);
        const double rho = 1.0;
        const double C1 = 2.0 * d * r / (xi * rho * c); // r = xi C1 eta / (2 d), eta = rho c
        double prev = 0.0;
        for (int n : {64, 128, 256, 512}) {
            AngularGrid g(n);
            AngularField m = vm_field(g, 0.2, r);
            for (double& v : m.v) v *= rho;
            const AngularField q = collision_operator(m, d, xi, C1);
            double worst = 0.0;
            for (double v : q.v) worst = std::max(worst, std::abs(v));
            if (prev > 0.0) {
                const double order = std::log2(prev / worst);
                CHECK(order > 1.9);
            }
            prev = worst;
        }
    }
}

TEST_CASE("pair alignment tensor") {
    const auto zero = pair_alignment_tensor(0.8, 0.8);
    for (int i = 0; i < 2; ++i)
        for (int j = 0; j < 2; ++j) CHECK(zero[i][j] == doctest::Approx(0.0));
    std::mt19937_64 gen(5);
    std::uniform_real_distribution<double> A(-kPi / 2, kPi / 2);
    for (int k = 0; k < 100; ++k) {
        const double t1 = A(gen), t2 = A(gen);
        const auto B = pair_alignment_tensor(t1, t2);
        const auto Bt = pair_alignment_tensor(t2, t1);
        CHECK(B[0][1] == doctest::Approx(B[1][0]));
        for (int i = 0; i < 2; ++i)
            for (int j = 0; j < 2; ++j) CHECK(B[i][j] == doctest::Approx(-Bt[i][j]));
    }
}

TEST_CASE("spatial coupling term vanishes for spatially uniform densities") {
    AngularGrid g(32);
    SpatialAngularField f(8, 6, 0.1, 0.2, g);
    AngularField m = vm_field(g, 0.1, 1.5);
    for (int iy = 0; iy < 6; ++iy)
        for (int ix = 0; ix < 8; ++ix)
            for (int j = 0; j < g.n; ++j) f.at(ix, iy, j) = 2.0 * m.v[j];
    const SpatialAngularField G = spatial_coupling_G(f, 0.7);
    for (double v : G.v) CHECK(std::abs(v) < 1e-12);
}

TEST_CASE("spatial coupling term matches a direct double quadrature") {
    AngularGrid g(64);
    SpatialAngularField f(8, 8, 0.125, 0.125, g);
    for (int iy = 0; iy < 8; ++iy)
        for (int ix = 0; ix < 8; ++ix)
            for (int j = 0; j < g.n; ++j)
                f.at(ix, iy, j) = 1.0 + 0.4 * std::cos(2.0 * kPi * ix / 8.0) *
                                            std::cos(2.0 * g.node(j)) +
                                  0.2 * std::sin(2.0 * kPi * iy / 8.0) * std::sin(2.0 * g.node(j));
    const double C2 = 1.3;
    const SpatialAngularField G = spatial_coupling_G(f, C2);

    // direct evaluation: angular integral by brute-force quadrature, spatial
    // second differences by hand
    auto direct_m = [&](int ix, int iy, int j, int a, int b) {
        double s = 0.0;
        for (int q = 0; q < g.n; ++q) {
            const auto B = pair_alignment_tensor(g.node(j), g.node(q));
            s += f.at(ix, iy, q) * B[a][b];
        }
        return s / g.n;
    };
    auto wrap = [&](int i, int n) { return (i % n + n) % n; };
    for (int iy : {0, 3}) {
        for (int ix : {1, 5}) {
            for (int j : {0, 17, 40}) {
                const double hx = f.hx, hy = f.hy;
                const double dxx = (direct_m(wrap(ix + 1, 8), iy, j, 0, 0) -
                                    2 * direct_m(ix, iy, j, 0, 0) +
                                    direct_m(wrap(ix - 1, 8), iy, j, 0, 0)) /
                                   (hx * hx);
                const double dyy = (direct_m(ix, wrap(iy + 1, 8), j, 1, 1) -
                                    2 * direct_m(ix, iy, j, 1, 1) +
                                    direct_m(ix, wrap(iy - 1, 8), j, 1, 1)) /
                                   (hy * hy);
                const double dxy = (direct_m(wrap(ix + 1, 8), wrap(iy + 1, 8), j, 0, 1) -
                                    direct_m(wrap(ix - 1, 8), wrap(iy + 1, 8), j, 0, 1) -
                                    direct_m(wrap(ix + 1, 8), wrap(iy - 1, 8), j, 0, 1) +
                                    direct_m(wrap(ix - 1, 8), wrap(iy - 1, 8), j, 0, 1)) /
                                   (4 * hx * hy);
                CHECK(G.at(ix, iy, j) ==
                      doctest::Approx(C2 * (dxx + 2 * dxy + dyy)).epsilon(1e-9));
            }
        }
    }
}

TEST_CASE("moment identities hold at quadrature accuracy") {
    for (double r : {0.5, 1.0, 2.0, 5.0, 20.0}) {
        const MomentIdentityReport rep = check_moment_identities(r);
        CHECK(rep.max_abs_mismatch < 1e-8);
    }
    CHECK_THROWS_AS((void)check_moment_identities(0.0), IsotropicSingular);
}

TEST_CASE("order-parameter fit recovers (c(r), theta0) from samples") {
    CounterRng base(5150);
    StreamRng rng(base, 9);
    const auto sample = vm_sample(rng, -0.2, 2.0, 1000000);
    const OrderParameters op = order_parameters(sample);
    CHECK(std::abs(op.eta - vm_order_parameter(2.0)) < 3.0 / std::sqrt(1e6));
    CHECK(std::abs(op.theta_mean - (-0.2)) < 0.01);
}
