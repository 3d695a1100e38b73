#pragma once

#include <array>
#include <cmath>

#include "fibrelax/errors.hpp"

namespace fibrelax {

using Vec2 = std::array<double, 2>;

inline constexpr double kPi = 3.141592653589793238462643383279502884;

// Guard for the parallel-fiber singularity, absolute on |sin(dtheta)|.
inline constexpr double kParallelEps = 1e-12;

// Unit vector along a fiber with line-angle theta.
inline Vec2 direction(double theta) {
    return {std::cos(theta), std::sin(theta)};
}

// Unit normal, rotated +pi/2 from direction(theta).
inline Vec2 normal(double theta) {
    return {-std::sin(theta), std::cos(theta)};
}

inline double dot(const Vec2& a, const Vec2& b) {
    return a[0] * b[0] + a[1] * b[1];
}

// Wrap a line-angle into [-pi/2, pi/2) modulo pi.
inline double wrap_angle(double theta) {
    double t = std::fmod(theta + kPi / 2.0, kPi);
    if (t < 0.0) t += kPi;
    return t - kPi / 2.0;
}

// Wrap a coordinate into [0, extent).
inline double wrap_coord(double x, double extent) {
    double w = std::fmod(x, extent);
    if (w < 0.0) w += extent;
    return w;
}

// Minimum-image displacement a - b in a periodic box.
inline double min_image(double a, double b, double extent) {
    double d = a - b;
    d -= extent * std::round(d / extent);
    return d;
}

// Signed distance from the center of fiber 1 to the point where the
// supporting line of fiber 2 crosses the supporting line of fiber 1,
// measured along direction(theta1). Throws ParallelFibers when the lines
// are (numerically) parallel.
inline double intersection_offset(const Vec2& x1, double theta1, const Vec2& x2, double theta2) {
    const double s = std::sin(theta2 - theta1);
    if (std::abs(s) < kParallelEps) throw ParallelFibers("parallel fibers have no crossing point");
    const double dx = x2[0] - x1[0];
    const double dy = x2[1] - x1[1];
    return (dx * std::sin(theta2) - dy * std::cos(theta2)) / s;
}

// True when two fibers of length L cross: both offsets to the line-line
// intersection lie within half a fiber length. Parallel fibers never cross.
inline bool fibers_intersect(const Vec2& x1, double theta1, const Vec2& x2, double theta2,
                             double L) {
    const double s = std::sin(theta2 - theta1);
    if (std::abs(s) < kParallelEps) return false;
    const double dx = x2[0] - x1[0];
    const double dy = x2[1] - x1[1];
    const double l12 = (dx * std::sin(theta2) - dy * std::cos(theta2)) / s;
    if (std::abs(l12) > L / 2.0) return false;
    // Swapped arguments: sin(theta1 - theta2) = -s.
    const double l21 = (-dx * std::sin(theta1) + dy * std::cos(theta1)) / (-s);
    return std::abs(l21) <= L / 2.0;
}

} // namespace fibrelax
