#include <doctest.h>

#include <cmath>

#include "fibrelax/errors.hpp"
#include "fibrelax/params.hpp"

using namespace fibrelax;

TEST_CASE("nondimensionalize: identity when both mobilities are one") {
    ModelParams p;
    p.kappa = 3.0;
    p.alpha = 2.0;
    p.d = 0.7;
    p.nu_f = 5.0;
    p.nu_d = 9.0;
    p.L = 1.7;
    const ModelParams q = nondimensionalize(p);
    CHECK(q.mu == 1.0);
    CHECK(q.lambda == 1.0);
    CHECK(q.kappa == doctest::Approx(3.0));
    CHECK(q.alpha == doctest::Approx(2.0));
    CHECK(q.d == doctest::Approx(0.7));
    CHECK(q.nu_f == doctest::Approx(5.0));
    CHECK(q.nu_d == doctest::Approx(9.0));
    CHECK(q.L == doctest::Approx(1.7));
}

TEST_CASE("nondimensionalize: unit substitution and idempotence") {
    ModelParams p;
    p.mu = 4.0;
    p.lambda = 1.0;
    p.L = 2.0;
    p.kappa = 0.5;
    p.alpha = 1.0;
    p.d = 0.25;
    p.nu_f = 3.0;
    p.nu_d = 6.0;
    const ModelParams q = nondimensionalize(p);
    // x0 = 2, t0 = 4
    CHECK(q.L == doctest::Approx(1.0));
    CHECK(q.kappa == doctest::Approx(0.5 * 16.0));
    CHECK(q.alpha == doctest::Approx(1.0 * 16.0 / 4.0));
    CHECK(q.d == doctest::Approx(0.25 * 16.0 / 4.0));
    CHECK(q.nu_f == doctest::Approx(12.0));
    CHECK(q.nu_d == doctest::Approx(24.0));
    // the derived concentration is invariant
    const double r_before = p.xi * p.alpha * p.L * p.L * p.gamma / (4.0 * p.d);
    const double r_after = q.xi * q.alpha * q.L * q.L * q.gamma / (4.0 * q.d);
    CHECK(r_after == doctest::Approx(r_before));
    // applying the map twice is the identity from then on
    const ModelParams qq = nondimensionalize(q);
    CHECK(qq.kappa == doctest::Approx(q.kappa));
    CHECK(qq.L == doctest::Approx(q.L));
    CHECK(qq.d == doctest::Approx(q.d));
}

TEST_CASE("nondimensionalize rejects nonpositive mobilities") {
    ModelParams p;
    p.mu = 0.0;
    CHECK_THROWS_AS((void)nondimensionalize(p), NonPositiveMobility);
    p.mu = 1.0;
    p.lambda = -1.0;
    CHECK_THROWS_AS((void)nondimensionalize(p), NonPositiveMobility);
}

TEST_CASE("nondimensionalize wraps the potentials consistently") {
    ModelParams p;
    p.mu = 4.0;
    p.lambda = 1.0;
    p.U0.value = [](double x, double y) { return x * x + 2.0 * y; };
    p.U0.grad = [](double x, double) { return Vec2{2.0 * x, 2.0}; };
    const ModelParams q = nondimensionalize(p);
    // U'(x') = (t0^2/x0^2) U(x0 x'), x0 = 2, t0 = 4 -> scale 4
    CHECK(q.U0.value(1.0, 1.0) == doctest::Approx(4.0 * (4.0 + 4.0)));
    CHECK(q.U0.grad(1.0, 0.0)[0] == doctest::Approx(4.0 * 2.0 * 2.0 * 2.0));
}

TEST_CASE("parameter validation catches violations") {
    ModelParams p;
    p.beta = 0.5;
    CHECK_THROWS_AS(validate(p), ConfigInvalid);
    p.beta = 1.0;
    p.L = 0.0;
    CHECK_THROWS_AS(validate(p), ConfigInvalid);
    p.L = 1.0;
    p.d = -0.1;
    CHECK_THROWS_AS(validate(p), ConfigInvalid);
    p.d = 0.1;
    CHECK_NOTHROW(validate(p));
    // U1 must be pi-periodic
    p.U1.value = [](double th) { return std::cos(th); };
    p.U1.dtheta = [](double th) { return -std::sin(th); };
    CHECK_THROWS_AS(validate(p), ConfigInvalid);
    p.U1.value = [](double th) { return std::cos(2.0 * th); };
    p.U1.dtheta = [](double th) { return -2.0 * std::sin(2.0 * th); };
    CHECK_NOTHROW(validate(p));
}
