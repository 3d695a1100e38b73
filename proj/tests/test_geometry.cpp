#include <doctest.h>

#include <cmath>
#include <random>

#include "fibrelax/geometry.hpp"

using namespace fibrelax;

namespace {

// Independent oracle: solve x1 + l1 w1 = x2 + l2 w2 as a 2x2 linear system.
struct LineCross {
    double l1, l2;
    bool ok;
};
LineCross line_cross_oracle(const Vec2& x1, double t1, const Vec2& x2, double t2) {
    const Vec2 w1 = direction(t1), w2 = direction(t2);
    const double det = -w1[0] * w2[1] + w1[1] * w2[0]; // det [w1, -w2]
    if (std::abs(det) < 1e-9) return {0, 0, false};
    const double bx = x2[0] - x1[0], by = x2[1] - x1[1];
    return {(-w2[1] * bx + w2[0] * by) / det, (-w1[1] * bx + w1[0] * by) / det, true};
}

} // namespace

TEST_CASE("direction vectors on the axes") {
    CHECK(direction(0.0)[0] == doctest::Approx(1.0));
    CHECK(direction(0.0)[1] == doctest::Approx(0.0));
    CHECK(direction(kPi / 2)[0] == doctest::Approx(0.0).epsilon(1e-12));
    CHECK(direction(kPi / 2)[1] == doctest::Approx(1.0));
    CHECK(direction(kPi / 4)[0] == doctest::Approx(0.70710678118654752));
    CHECK(direction(kPi / 4)[1] == doctest::Approx(0.70710678118654752));
}

TEST_CASE("angle wrapping stays in [-pi/2, pi/2) and is pi-periodic") {
    std::mt19937_64 gen(11);
    std::uniform_real_distribution<double> U(-20.0, 20.0);
    for (int k = 0; k < 1000; ++k) {
        const double t = U(gen);
        const double w = wrap_angle(t);
        CHECK(w >= -kPi / 2);
        CHECK(w < kPi / 2);
        CHECK(wrap_angle(t + kPi) == doctest::Approx(w).epsilon(1e-12));
        CHECK(std::abs(std::sin(t - w)) < 1e-12); // same line modulo pi
    }
}

TEST_CASE("intersection offset: worked example and degenerate cases") {
    CHECK(intersection_offset({0, 0}, 0.0, {0.3, 0.2}, kPi / 2) == doctest::Approx(0.3));
    CHECK(intersection_offset({0, 0}, 0.0, {0, 0}, kPi / 2) == doctest::Approx(0.0));
    CHECK_THROWS_AS((void)intersection_offset({0, 0}, 0.0, {0, 0}, 0.0), ParallelFibers);
}

TEST_CASE("intersection offsets match the 2x2 linear-system oracle") {
    std::mt19937_64 gen(42);
    std::uniform_real_distribution<double> U(-2.0, 2.0);
    std::uniform_real_distribution<double> A(-kPi / 2, kPi / 2);
    int tested = 0;
    while (tested < 1000) {
        const Vec2 x1{U(gen), U(gen)}, x2{U(gen), U(gen)};
        const double t1 = A(gen), t2 = A(gen);
        if (std::abs(std::sin(t2 - t1)) < 1e-6) continue;
        const LineCross oracle = line_cross_oracle(x1, t1, x2, t2);
        REQUIRE(oracle.ok);
        const double l12 = intersection_offset(x1, t1, x2, t2);
        const double l21 = intersection_offset(x2, t2, x1, t1);
        CHECK(l12 == doctest::Approx(oracle.l1).epsilon(1e-9));
        CHECK(l21 == doctest::Approx(oracle.l2).epsilon(1e-9));
        // both offsets reconstruct the same point
        const Vec2 w1 = direction(t1), w2 = direction(t2);
        CHECK(std::abs(x1[0] + l12 * w1[0] - x2[0] - l21 * w2[0]) < 1e-9);
        CHECK(std::abs(x1[1] + l12 * w1[1] - x2[1] - l21 * w2[1]) < 1e-9);
        ++tested;
    }
}

TEST_CASE("fibers_intersect basics") {
    CHECK(fibers_intersect({0, 0}, 0.0, {0, 0}, kPi / 2, 0.5));
    CHECK_FALSE(fibers_intersect({0, 0}, 0.0, {10, 0.1}, kPi / 2, 1.0));
    CHECK_FALSE(fibers_intersect({0, 0}, 0.3, {1, 1}, 0.3, 5.0)); // parallel
    // crossing exactly at the tips
    CHECK(fibers_intersect({0, 0}, 0.0, {0.5, 0.5}, kPi / 2, 1.0));
    CHECK_FALSE(fibers_intersect({0, 0}, 0.0, {0.502, 0.502}, kPi / 2, 1.0));
}

TEST_CASE("minimum image displacement") {
    CHECK(min_image(0.1, 9.9, 10.0) == doctest::Approx(0.2));
    CHECK(min_image(9.9, 0.1, 10.0) == doctest::Approx(-0.2));
    CHECK(min_image(3.0, 1.0, 10.0) == doctest::Approx(2.0));
}
