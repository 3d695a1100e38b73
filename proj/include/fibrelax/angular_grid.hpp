#pragma once

#include <vector>

#include "fibrelax/errors.hpp"
#include "fibrelax/geometry.hpp"
#include "fibrelax/simd.hpp"

namespace fibrelax {

// Uniform periodic grid of n points on [-pi/2, pi/2); node j sits at
// -pi/2 + j*pi/n. All integrals use the dtheta/pi normalization, so the
// integral of a gridded function is just the mean of its values (periodic
// trapezoid rule, spectrally accurate for smooth periodic integrands).
struct AngularGrid {
    int n;

    explicit AngularGrid(int n_points) : n(n_points) {
        if (n < 16 || n % 2 != 0) throw ConfigInvalid("n_theta", "must be an even integer >= 16");
    }
    double dtheta() const { return kPi / n; }
    double node(int j) const { return -kPi / 2.0 + j * dtheta(); }
};

struct AngularField {
    int n = 0;
    std::vector<double> v;

    AngularField() = default;
    explicit AngularField(const AngularGrid& g, double fill = 0.0) : n(g.n), v(g.n, fill) {}
};

inline double grid_mean(const AngularField& f) {
    return simd::reduce_sum(f.v.data(), f.v.size()) / f.n;
}

inline double grid_mean_product(const AngularField& f, const AngularField& w) {
    return simd::reduce_dot(f.v.data(), w.v.data(), f.v.size()) / f.n;
}

// Cached cos(2 theta_j), sin(2 theta_j) tables for moment evaluation.
struct AngularTables {
    AngularField cos2;
    AngularField sin2;

    explicit AngularTables(const AngularGrid& g) : cos2(g), sin2(g) {
        for (int j = 0; j < g.n; ++j) {
            cos2.v[j] = std::cos(2.0 * g.node(j));
            sin2.v[j] = std::sin(2.0 * g.node(j));
        }
    }
};

} // namespace fibrelax
