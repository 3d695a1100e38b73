#include "fibrelax/kinetic.hpp"

#include <cmath>

#include "fibrelax/errors.hpp"

namespace fibrelax {

namespace {

// exp(r cos 2 theta_j) on the grid
std::vector<double> vm_weights(const AngularGrid& g, const AngularTables& tab, double r,
                               double theta0 = 0.0) {
    std::vector<double> w(g.n);
    if (theta0 == 0.0) {
        for (int j = 0; j < g.n; ++j) w[j] = std::exp(r * tab.cos2.v[j]);
    } else {
        const double c0 = std::cos(2.0 * theta0);
        const double s0 = std::sin(2.0 * theta0);
        for (int j = 0; j < g.n; ++j)
            w[j] = std::exp(r * (tab.cos2.v[j] * c0 + tab.sin2.v[j] * s0));
    }
    return w;
}

} // namespace

double partition_function(double r, int p, int n_theta) {
    if (r < 0.0) throw NegativeConcentration("partition_function requires r >= 0");
    if (p < 0 || p > 4) throw DomainError("partition_function derivative order must be in 0..4");
    const AngularGrid g(n_theta);
    const AngularTables tab(g);
    const std::vector<double> w = vm_weights(g, tab, r);
    if (p == 0) return simd::reduce_sum(w.data(), w.size()) / g.n;
    std::vector<double> cp(tab.cos2.v);
    for (int q = 1; q < p; ++q)
        for (int j = 0; j < g.n; ++j) cp[j] *= tab.cos2.v[j];
    return simd::reduce_dot(w.data(), cp.data(), w.size()) / g.n;
}

double vm_order_parameter(double r, int n_theta) {
    if (r < 0.0) throw NegativeConcentration("vm_order_parameter requires r >= 0");
    const AngularGrid g(n_theta);
    const AngularTables tab(g);
    const std::vector<double> w = vm_weights(g, tab, r);
    const double z0 = simd::reduce_sum(w.data(), w.size());
    const double z1 = simd::reduce_dot(w.data(), tab.cos2.v.data(), w.size());
    return z1 / z0;
}

double vm_concentration_from_order(double eta, double r_max, double tol) {
    if (eta <= 0.0) return 0.0;
    if (eta >= vm_order_parameter(r_max))
        throw DomainError("order parameter too close to 1 to invert on [0, r_max]");
    double lo = 0.0, hi = r_max;
    while (hi - lo > tol) {
        const double mid = 0.5 * (lo + hi);
        (vm_order_parameter(mid) < eta ? lo : hi) = mid;
    }
    return 0.5 * (lo + hi);
}

Coefficients coefficients_from_r(double d, double L, double r, int n_theta) {
    if (r < 0.0) throw NegativeConcentration("coefficients require r >= 0");
    if (r == 0.0) throw IsotropicSingular("alpha1 = 0 at r = 0; coefficients undefined");
    const AngularGrid g(n_theta);
    const AngularTables tab(g);
    const std::vector<double> w = vm_weights(g, tab, r);
    Coefficients co;
    co.r = r;
    co.Z = simd::reduce_sum(w.data(), w.size()) / g.n;
    co.c = simd::reduce_dot(w.data(), tab.cos2.v.data(), w.size()) / g.n / co.Z;
    const double Z2 = co.Z * co.Z;
    co.alpha1 = 1.0 - 1.0 / Z2;
    co.script_A = 0.25 / Z2 - 1.0 + 1.5 * co.c / r;
    co.alpha2 = d * (1.0 + L * L * r * co.c / (6.0 * co.alpha1));
    co.alpha3 = d * L * L * r * co.script_A / (6.0 * co.alpha1);
    co.alpha4 = d * r * L * L / (48.0 * Z2 * co.alpha1);
    co.alpha5 = 1.0 / co.alpha1;
    return co;
}

Coefficients coefficients(double d, double L, double xi, double alpha, double gamma, double nu_f,
                          double nu_d, int n_theta) {
    if (!(d > 0.0) || !(L > 0.0) || !(xi > 0.0) || !(alpha > 0.0) || !(gamma > 0.0) ||
        !(nu_f > 0.0) || !(nu_d > 0.0))
        throw DomainError("coefficients require strictly positive inputs");
    const double r = xi * alpha * L * L * gamma / (4.0 * d);
    Coefficients co = coefficients_from_r(d, L, r, n_theta);
    co.C1 = alpha * L * L * nu_f / (2.0 * nu_d);
    co.C2 = alpha * L * L * L * L * nu_f / (48.0 * nu_d);
    return co;
}

double vm_pdf(double theta, double theta0, double r) {
    if (r < 0.0) throw NegativeConcentration("vm_pdf requires r >= 0");
    return std::exp(r * std::cos(2.0 * (theta - theta0))) / partition_function(r);
}

AngularField vm_field(const AngularGrid& g, double theta0, double r) {
    if (r < 0.0) throw NegativeConcentration("vm_field requires r >= 0");
    const AngularTables tab(g);
    AngularField f(g);
    f.v = vm_weights(g, tab, r, theta0);
    const double Z = simd::reduce_sum(f.v.data(), f.v.size()) / g.n;
    for (double& x : f.v) x /= Z;
    return f;
}

std::vector<double> vm_sample(StreamRng& rng, double theta0, double r, std::size_t n) {
    if (r < 0.0) throw NegativeConcentration("vm_sample requires r >= 0");
    std::vector<double> out;
    out.reserve(n);
    while (out.size() < n) {
        const double th = -kPi / 2.0 + kPi * rng.uniform();
        const double u = rng.uniform();
        if (u <= std::exp(r * (std::cos(2.0 * (th - theta0)) - 1.0)))
            out.push_back(wrap_angle(th));
    }
    return out;
}

AngularField mean_field_potential(const AngularField& f, double C1) {
    const AngularGrid g(f.n);
    const AngularTables tab(g);
    const double rho = grid_mean(f);
    const double a = grid_mean_product(f, tab.cos2);
    const double b = grid_mean_product(f, tab.sin2);
    AngularField phi(g);
    for (int j = 0; j < g.n; ++j)
        phi.v[j] = 0.5 * C1 * (rho - a * tab.cos2.v[j] - b * tab.sin2.v[j]);
    return phi;
}

AngularField collision_operator(const AngularField& f, double d, double xi, double C1) {
    const AngularGrid g(f.n);
    for (double x : f.v)
        if (!(x > 0.0)) throw NonPositiveDensity("collision_operator requires f > 0");
    const AngularField phi = mean_field_potential(f, C1);
    const double h = g.dtheta();
    const int n = g.n;
    // flux at face j+1/2: diffusive part + drift by the potential gradient
    std::vector<double> flux(n);
    for (int j = 0; j < n; ++j) {
        const int jp = (j + 1) % n;
        const double dphi = (phi.v[jp] - phi.v[j]) / h;
        flux[j] = d * (f.v[jp] - f.v[j]) / h + xi * dphi * 0.5 * (f.v[jp] + f.v[j]);
    }
    AngularField q(g);
    for (int j = 0; j < n; ++j) {
        const int jm = (j + n - 1) % n;
        q.v[j] = (flux[j] - flux[jm]) / h;
    }
    return q;
}

std::array<std::array<double, 2>, 2> pair_alignment_tensor(double theta1, double theta2) {
    const double s = std::sin(2.0 * (theta1 - theta2));
    const Vec2 w1 = direction(theta1);
    const Vec2 w2 = direction(theta2);
    std::array<std::array<double, 2>, 2> B;
    for (int i = 0; i < 2; ++i)
        for (int j = 0; j < 2; ++j) B[i][j] = s * (w1[i] * w1[j] + w2[i] * w2[j]);
    return B;
}

SpatialAngularField spatial_coupling_G(const SpatialAngularField& f, double C2) {
    const AngularGrid& g = f.grid;
    const AngularTables tab(g);
    AngularField cos4(g), sin4(g);
    for (int j = 0; j < g.n; ++j) {
        cos4.v[j] = std::cos(4.0 * g.node(j));
        sin4.v[j] = std::sin(4.0 * g.node(j));
    }
    const int nx = f.nx, ny = f.ny, n = g.n;

    // Angular moments per cell, then the three independent components of the
    // B-weighted average m(theta1) per cell, then spatial second differences.
    std::vector<double> m11(static_cast<std::size_t>(nx) * ny * n);
    std::vector<double> m12(m11.size()), m22(m11.size());
    for (int iy = 0; iy < ny; ++iy) {
        for (int ix = 0; ix < nx; ++ix) {
            const double* fv = &f.v[(static_cast<std::size_t>(iy) * nx + ix) * n];
            const double rho = simd::reduce_sum(fv, n) / n;
            const double a2 = simd::reduce_dot(fv, tab.cos2.v.data(), n) / n;
            const double b2 = simd::reduce_dot(fv, tab.sin2.v.data(), n) / n;
            const double a4 = simd::reduce_dot(fv, cos4.v.data(), n) / n;
            const double b4 = simd::reduce_dot(fv, sin4.v.data(), n) / n;
            for (int j = 0; j < n; ++j) {
                const double c1 = tab.cos2.v[j], s1 = tab.sin2.v[j];
                const double A = s1 * a2 - c1 * b2;
                const double Bc = s1 * 0.5 * (rho + a4) - c1 * 0.5 * b4;
                const double Bs = s1 * 0.5 * b4 - c1 * 0.5 * (rho - a4);
                const std::size_t idx = (static_cast<std::size_t>(iy) * nx + ix) * n + j;
                m11[idx] = A + 0.5 * (c1 * A + Bc);
                m22[idx] = A - 0.5 * (c1 * A + Bc);
                m12[idx] = 0.5 * (s1 * A + Bs);
            }
        }
    }

    SpatialAngularField out(nx, ny, f.hx, f.hy, g);
    const double ihx2 = 1.0 / (f.hx * f.hx);
    const double ihy2 = 1.0 / (f.hy * f.hy);
    const double ihxy = 1.0 / (4.0 * f.hx * f.hy);
    auto idx = [&](int ix, int iy, int j) {
        return (static_cast<std::size_t>((iy + ny) % ny) * nx + (ix + nx) % nx) * n + j;
    };
    for (int iy = 0; iy < ny; ++iy) {
        for (int ix = 0; ix < nx; ++ix) {
            for (int j = 0; j < n; ++j) {
                const double dxx = (m11[idx(ix + 1, iy, j)] - 2.0 * m11[idx(ix, iy, j)] +
                                    m11[idx(ix - 1, iy, j)]) *
                                   ihx2;
                const double dyy = (m22[idx(ix, iy + 1, j)] - 2.0 * m22[idx(ix, iy, j)] +
                                    m22[idx(ix, iy - 1, j)]) *
                                   ihy2;
                const double dxy = (m12[idx(ix + 1, iy + 1, j)] - m12[idx(ix - 1, iy + 1, j)] -
                                    m12[idx(ix + 1, iy - 1, j)] + m12[idx(ix - 1, iy - 1, j)]) *
                                   ihxy;
                out.at(ix, iy, j) = C2 * (dxx + 2.0 * dxy + dyy);
            }
        }
    }
    return out;
}

AngularField gci_profile(const AngularGrid& g, double r) {
    if (r < 0.0) throw NegativeConcentration("gci_profile requires r >= 0");
    if (r == 0.0) throw IsotropicSingular("gci profile undefined at r = 0");
    const int m = g.n / 2;
    const double h = g.dtheta();

    // F(t) = integral of exp(-r cos 2u) du from 0 to t, prefix-summed with
    // per-interval Gauss-Legendre so the node values carry quadrature error
    // far below the later finite-difference error.
    static const double gl_x[4] = {0.1834346424956498, 0.5255324099163290, 0.7966664774136267,
                                   0.9602898564975363};
    static const double gl_w[4] = {0.3626837833783620, 0.3137066458778873, 0.2223810344533745,
                                   0.1012285362903763};
    std::vector<double> F(m + 1, 0.0);
    for (int k = 1; k <= m; ++k) {
        const double a = (k - 1) * h, b = k * h;
        const double mid = 0.5 * (a + b), half = 0.5 * (b - a);
        double s = 0.0;
        for (int q = 0; q < 4; ++q) {
            s += gl_w[q] * (std::exp(-r * std::cos(2.0 * (mid + half * gl_x[q]))) +
                            std::exp(-r * std::cos(2.0 * (mid - half * gl_x[q]))));
        }
        F[k] = F[k - 1] + half * s;
    }

    std::vector<double> ghalf(m + 1);
    const double inv2r = 1.0 / (2.0 * r);
    for (int k = 0; k <= m; ++k)
        ghalf[k] = inv2r * (k * h - (kPi / 2.0) * (F[k] / F[m]));
    ghalf[0] = 0.0;
    ghalf[m] = 0.0; // exact by construction: pi/2 - (pi/2)*1

    AngularField out(g);
    for (int j = 0; j < g.n; ++j) {
        if (j >= m)
            out.v[j] = ghalf[j - m]; // theta = (j - m) h in [0, pi/2)
        else if (j == 0)
            out.v[j] = 0.0; // theta = -pi/2, pi-periodic image of pi/2
        else
            out.v[j] = -ghalf[m - j]; // odd extension for theta < 0
    }
    return out;
}

double gci_profile_derivative(double theta, double r, int n_theta) {
    if (r <= 0.0) throw IsotropicSingular("gci profile derivative undefined at r = 0");
    const double Z = partition_function(r, 0, n_theta);
    return (1.0 - std::exp(-r * std::cos(2.0 * theta)) / Z) / (2.0 * r);
}

MomentIdentityReport check_moment_identities(double r, int n_theta) {
    if (r <= 0.0) throw IsotropicSingular("moment identities need r > 0");
    const AngularGrid g(n_theta);
    const AngularTables tab(g);
    const AngularField M = vm_field(g, 0.0, r);
    const double Z = partition_function(r, 0, n_theta);
    const double Z2 = Z * Z;

    auto avg = [&](const AngularField& h) { return grid_mean_product(M, h); };
    auto make = [&](auto&& fn) {
        AngularField f(g);
        for (int j = 0; j < g.n; ++j) f.v[j] = fn(tab.cos2.v[j], tab.sin2.v[j]);
        return f;
    };

    const AngularField c1f = make([](double c, double) { return c; });
    const AngularField s2f = make([](double, double s) { return s * s; });
    const AngularField c2f = make([](double c, double) { return c * c; });
    const AngularField c3f = make([](double c, double) { return c * c * c; });
    const AngularField c4f = make([](double c, double) { return c * c * c * c; });
    const AngularField cs2f = make([](double c, double s) { return c * s * s; });
    const AngularField s4f = make([](double, double s) { return s * s * s * s; });

    const double c = avg(c1f);
    const double s2 = avg(s2f);
    const double c2 = avg(c2f);

    // T1, T2 as functions of theta' (built from the quadrature moments)
    AngularField T1(g), T2(g), sT1(g), cT2(g), s2T2(g);
    for (int j = 0; j < g.n; ++j) {
        const double cp = tab.cos2.v[j], sp = tab.sin2.v[j];
        T1.v[j] = sp / (4.0 * Z2) - 0.5 * (cp * sp * c + sp * c2);
        T2.v[j] = 0.5 * (cp * s2 - sp * sp * c) - cp / (4.0 * Z2);
        sT1.v[j] = sp * T1.v[j];
        cT2.v[j] = cp * T2.v[j];
        s2T2.v[j] = sp * sp * T2.v[j];
    }

    const AngularField psi = gci_profile(g, r);
    AngularField spsi(g);
    for (int j = 0; j < g.n; ++j) spsi.v[j] = tab.sin2.v[j] * psi.v[j];

    MomentIdentityReport rep;
    auto add = [&](const char* name, double quad, double closed) {
        rep.entries.push_back({name, quad, closed});
        const double miss = std::abs(quad - closed);
        if (miss > rep.max_abs_mismatch) rep.max_abs_mismatch = miss;
    };

    add("<s0^2> = <c0>/r", s2, c / r);
    add("<c0^2> = 1 - <c0>/r", c2, 1.0 - c / r);
    add("<c0^3>", avg(c3f), c - 1.0 / r + 2.0 * c / (r * r));
    add("<c0^4>", avg(c4f), 1.0 - 2.0 * c / r + 3.0 / (r * r) - 6.0 * c / (r * r * r));
    add("<c0 s0^2>", avg(cs2f), (1.0 - 2.0 * c / r) / r);
    add("<s0^4>", avg(s4f), 3.0 * (1.0 - 2.0 * c / r) / (r * r));
    add("<s0 psi> = alpha1/(4 r^2)", avg(spsi), (1.0 - 1.0 / Z2) / (4.0 * r * r));
    add("<T2>", avg(T2), -c / (4.0 * Z2));
    add("<c0 T2>", avg(cT2), c * c / (2.0 * r * r) - (1.0 - c / r) / (4.0 * Z2));
    add("<s0^2 T2>", avg(s2T2),
        (-1.0 / r + 2.0 * c / (r * r)) / (4.0 * Z2) + 2.0 * c * c / (r * r * r) - c / (r * r));
    add("<s0 T1>", avg(sT1), -c / r + 1.5 * c * c / (r * r) + c / (4.0 * r * Z2));
    add("r<s0^2 T2> - <c0 T2> = (c/r) A(r)", r * avg(s2T2) - avg(cT2),
        (c / r) * (0.25 / Z2 - 1.0 + 1.5 * c / r));
    {
        AngularField odd(g);
        for (int j = 0; j < g.n; ++j)
            odd.v[j] = tab.sin2.v[j] * (1.0 + tab.cos2.v[j] * tab.cos2.v[j]);
        add("<odd> = 0", avg(odd), 0.0);
    }
    return rep;
}

} // namespace fibrelax
