#include "fibrelax/macro.hpp"

#include <algorithm>
#include <cmath>

#include "fibrelax/errors.hpp"
#include "fibrelax/simd.hpp"

namespace fibrelax {

double MacroState::theta0(int ix, int iy) const {
    const std::size_t i = idx(ix, iy);
    return wrap_angle(0.5 * std::atan2(s2[i], c2[i]));
}

void MacroState::set_theta0(int ix, int iy, double theta) {
    const std::size_t i = idx(ix, iy);
    c2[i] = std::cos(2.0 * theta);
    s2[i] = std::sin(2.0 * theta);
}

double total_mass(const MacroState& s) {
    // Neumaier-compensated sum; the mass observable must resolve drifts far
    // below the rounding noise of a plain accumulation.
    double sum = 0.0, comp = 0.0;
    for (double v : s.rho) {
        const double t = sum + v;
        comp += (std::abs(sum) >= std::abs(v)) ? (sum - t) + v : (v - t) + sum;
        sum = t;
    }
    return (sum + comp) * s.hx() * s.hy();
}

DriftVelocities make_drift(const MacroState& s, const SpatialPotential& U0) {
    DriftVelocities d;
    if (U0.empty()) return d;
    const std::size_t n = s.rho.size();
    d.vx_east.resize(n);
    d.vy_north.resize(n);
    for (int iy = 0; iy < s.ny; ++iy) {
        for (int ix = 0; ix < s.nx; ++ix) {
            const std::size_t i = s.idx(ix, iy);
            d.vx_east[i] = U0.grad((ix + 1.0) * s.hx(), s.cell_y(iy))[0];
            d.vy_north[i] = U0.grad(s.cell_x(ix), (iy + 1.0) * s.hy())[1];
        }
    }
    return d;
}

void rho_step(MacroState& s, const DriftVelocities* drift, double d, double dt) {
    const int nx = s.nx, ny = s.ny;
    const double hx = s.hx(), hy = s.hy();
    const bool has_drift = drift && !drift->vx_east.empty();

    double vmax_x = 0.0, vmax_y = 0.0;
    if (has_drift) {
        for (double v : drift->vx_east) vmax_x = std::max(vmax_x, std::abs(v));
        for (double v : drift->vy_north) vmax_y = std::max(vmax_y, std::abs(v));
    }
    const double rate =
        2.0 * d * (1.0 / (hx * hx) + 1.0 / (hy * hy)) + vmax_x / hx + vmax_y / hy;
    if (dt * rate > 1.0) throw CFLViolation("rho_step: dt exceeds the stability bound");

    const std::size_t n = s.rho.size();
    // Fluxes are pre-divided by the face spacing so the divergence update is
    // a single fused kernel with scale dt. Each face value is shared by its
    // two cells, which makes the update telescoping (mass drift ~ ULP/step).
    std::vector<double> fx(n), fy(n), zero;
    if (!has_drift) zero.assign(std::max(nx, ny), 0.0);

    for (int iy = 0; iy < ny; ++iy) {
        const double* row = &s.rho[s.idx(0, iy)];
        double* f = &fx[s.idx(0, iy)];
        const double* vel = has_drift ? &drift->vx_east[s.idx(0, iy)] : zero.data();
        if (has_drift) {
            // velocities enter scaled by 1/hx
            static thread_local std::vector<double> vscaled;
            vscaled.resize(nx);
            for (int ix = 0; ix < nx; ++ix) vscaled[ix] = vel[ix] / hx;
            simd::upwind_diffusion_flux(f, row, row + 1, vscaled.data(), d / (hx * hx),
                                        static_cast<std::size_t>(nx - 1));
            const double vw = vscaled[nx - 1];
            f[nx - 1] = std::min(vw, 0.0) * row[nx - 1] + std::max(vw, 0.0) * row[0] +
                        d / (hx * hx) * (row[0] - row[nx - 1]);
        } else {
            simd::upwind_diffusion_flux(f, row, row + 1, zero.data(), d / (hx * hx),
                                        static_cast<std::size_t>(nx - 1));
            f[nx - 1] = d / (hx * hx) * (row[0] - row[nx - 1]);
        }
    }
    for (int iy = 0; iy < ny; ++iy) {
        const double* row = &s.rho[s.idx(0, iy)];
        const double* rowN = &s.rho[s.idx(0, iy + 1)];
        double* f = &fy[s.idx(0, iy)];
        if (has_drift) {
            static thread_local std::vector<double> vscaled;
            vscaled.resize(nx);
            const double* vel = &drift->vy_north[s.idx(0, iy)];
            for (int ix = 0; ix < nx; ++ix) vscaled[ix] = vel[ix] / hy;
            simd::upwind_diffusion_flux(f, row, rowN, vscaled.data(), d / (hy * hy),
                                        static_cast<std::size_t>(nx));
        } else {
            simd::upwind_diffusion_flux(f, row, rowN, zero.data(), d / (hy * hy),
                                        static_cast<std::size_t>(nx));
        }
    }
    for (int iy = 0; iy < ny; ++iy) {
        double* rho = &s.rho[s.idx(0, iy)];
        const double* fe = &fx[s.idx(0, iy)];
        const double* fn = &fy[s.idx(0, iy)];
        const double* fs = &fy[s.idx(0, iy - 1)];
        simd::flux_divergence_update(rho + 1, fe + 1, fe, fn + 1, fs + 1, dt,
                                     static_cast<std::size_t>(nx - 1));
        rho[0] += dt * ((fe[0] - fe[nx - 1]) + (fn[0] - fs[0]));
    }
    s.time += dt;
}

void rho_step(MacroState& s, const SpatialPotential& U0, double d, double dt) {
    if (U0.empty()) {
        rho_step(s, static_cast<const DriftVelocities*>(nullptr), d, dt);
    } else {
        const DriftVelocities drift = make_drift(s, U0);
        rho_step(s, &drift, d, dt);
    }
}

Mat2 matrix_A(double theta0, double alpha2, double alpha3) {
    const double c = std::cos(2.0 * theta0);
    const double s = std::sin(2.0 * theta0);
    return {alpha2 - alpha3 * c, -alpha3 * s, -alpha3 * s, alpha2 + alpha3 * c};
}

namespace {

// Angle of a neighbor cell relative to the center cell, from the embedding:
// half the argument of (c,s)_nb rotated back by (c,s)_C; lands in
// (-pi/2, pi/2], which is the local branch for smooth fields.
inline double rel_angle(double cC, double sC, double cN, double sN) {
    return 0.5 * std::atan2(sN * cC - cN * sC, cN * cC + sN * sC);
}

struct CellDerivs {
    double tx, ty, txx, tyy, txy; // orientation derivatives (local branch)
    double rx, ry, rxx, ryy, rxy; // density derivatives
};

CellDerivs cell_derivs(const MacroState& s, int ix, int iy) {
    const double hx = s.hx(), hy = s.hy();
    const std::size_t iC = s.idx(ix, iy);
    const double cC = s.c2[iC], sC = s.s2[iC];
    auto rel = [&](int jx, int jy) {
        const std::size_t i = s.idx(jx, jy);
        return rel_angle(cC, sC, s.c2[i], s.s2[i]);
    };
    const double dE = rel(ix + 1, iy), dW = rel(ix - 1, iy);
    const double dN = rel(ix, iy + 1), dS = rel(ix, iy - 1);
    CellDerivs d;
    d.tx = (dE - dW) / (2.0 * hx);
    d.ty = (dN - dS) / (2.0 * hy);
    d.txx = (dE + dW) / (hx * hx);
    d.tyy = (dN + dS) / (hy * hy);
    d.txy = (rel(ix + 1, iy + 1) - rel(ix - 1, iy + 1) - rel(ix + 1, iy - 1) +
             rel(ix - 1, iy - 1)) /
            (4.0 * hx * hy);
    const double rC = s.rho[iC];
    const double rE = s.rho[s.idx(ix + 1, iy)], rW = s.rho[s.idx(ix - 1, iy)];
    const double rN = s.rho[s.idx(ix, iy + 1)], rS = s.rho[s.idx(ix, iy - 1)];
    d.rx = (rE - rW) / (2.0 * hx);
    d.ry = (rN - rS) / (2.0 * hy);
    d.rxx = (rE - 2.0 * rC + rW) / (hx * hx);
    d.ryy = (rN - 2.0 * rC + rS) / (hy * hy);
    d.rxy = (s.rho[s.idx(ix + 1, iy + 1)] - s.rho[s.idx(ix - 1, iy + 1)] -
             s.rho[s.idx(ix + 1, iy - 1)] + s.rho[s.idx(ix - 1, iy - 1)]) /
            (4.0 * hx * hy);
    return d;
}

// Per-cell <dU1/dtheta> against the local equilibrium with concentration r.
struct U1Average {
    std::vector<double> du1, cos2, sin2;
    double r;

    U1Average(const AngularPotential& U1, double r_, int n_pts) : r(r_) {
        const AngularGrid g(n_pts);
        du1.resize(g.n);
        cos2.resize(g.n);
        sin2.resize(g.n);
        for (int j = 0; j < g.n; ++j) {
            du1[j] = U1.dtheta(g.node(j));
            cos2[j] = std::cos(2.0 * g.node(j));
            sin2[j] = std::sin(2.0 * g.node(j));
        }
    }

    double at(double c2, double s2) const {
        double num = 0.0, den = 0.0;
        for (std::size_t j = 0; j < du1.size(); ++j) {
            const double w = std::exp(r * (cos2[j] * c2 + sin2[j] * s2));
            num += du1[j] * w;
            den += w;
        }
        return num / den;
    }
};

} // namespace

void theta_step(MacroState& s, const Coefficients& co, const SpatialPotential& U0,
                const AngularPotential& U1, double dt, int u1_quad_points) {
    const int nx = s.nx, ny = s.ny;
    const double hx = s.hx(), hy = s.hy();
    const double lam = co.alpha2 + std::abs(co.alpha3);

    double advx = 0.0, advy = 0.0;
    std::vector<double> u0x, u0y;
    if (!U0.empty()) {
        u0x.resize(s.rho.size());
        u0y.resize(s.rho.size());
        for (int iy = 0; iy < ny; ++iy)
            for (int ix = 0; ix < nx; ++ix) {
                const Vec2 g = U0.grad(s.cell_x(ix), s.cell_y(iy));
                u0x[s.idx(ix, iy)] = g[0];
                u0y[s.idx(ix, iy)] = g[1];
                advx = std::max(advx, std::abs(g[0]));
                advy = std::max(advy, std::abs(g[1]));
            }
    }
    const double rate = 2.0 * lam * (1.0 / (hx * hx) + 1.0 / (hy * hy)) + advx / hx + advy / hy;
    if (dt * rate > 1.0) throw CFLViolation("theta_step: dt exceeds the stability bound");

    constexpr double rho_min = 1e-8;
    for (double r : s.rho)
        if (r < rho_min) throw DensityFloorViolated("theta_step: rho below 1e-8 floor");

    const U1Average* u1avg = nullptr;
    U1Average u1avg_store = U1.empty() ? U1Average(AngularPotential{[](double) { return 0.0; },
                                                                    [](double) { return 0.0; }},
                                                   co.r, 16)
                                       : U1Average(U1, co.r, u1_quad_points);
    if (!U1.empty()) u1avg = &u1avg_store;

    std::vector<double> dtheta(s.rho.size());
    for (int iy = 0; iy < ny; ++iy) {
        for (int ix = 0; ix < nx; ++ix) {
            const std::size_t i = s.idx(ix, iy);
            const double rho = s.rho[i];
            const double c = s.c2[i], sn = s.s2[i];
            const CellDerivs dd = cell_derivs(s, ix, iy);

            double rhs = 0.0;
            if (!u0x.empty()) rhs += rho * (u0x[i] * dd.tx + u0y[i] * dd.ty);
            rhs += 2.0 * co.alpha2 * (dd.rx * dd.tx + dd.ry * dd.ty);
            rhs += co.alpha2 * rho * (dd.txx + dd.tyy);
            // (rho H + grad t (x) grad r + grad r (x) grad t) : P,
            // P = [[c, s], [s, -c]]
            const double hessP = c * (dd.txx - dd.tyy) + 2.0 * sn * dd.txy;
            const double gradP = 2.0 * c * (dd.tx * dd.rx - dd.ty * dd.ry) +
                                 2.0 * sn * (dd.tx * dd.ry + dd.ty * dd.rx);
            rhs -= co.alpha3 * (rho * hessP + gradP);
            // (2 rho a3 grad t (x) grad t - a4 Hess rho) : S,
            // S = [[-s, c], [c, s]]
            const double gtS = sn * (dd.ty * dd.ty - dd.tx * dd.tx) + 2.0 * c * dd.tx * dd.ty;
            const double hrS = sn * (dd.ryy - dd.rxx) + 2.0 * c * dd.rxy;
            rhs -= 2.0 * rho * co.alpha3 * gtS - co.alpha4 * hrS;
            if (u1avg) rhs -= co.alpha5 * rho * u1avg->at(c, sn);

            dtheta[i] = dt * rhs / rho;
        }
    }
    // rotate the embedding by 2*dtheta and renormalize
    for (std::size_t i = 0; i < s.rho.size(); ++i) {
        const double cd = std::cos(2.0 * dtheta[i]);
        const double sd = std::sin(2.0 * dtheta[i]);
        const double c = s.c2[i] * cd - s.s2[i] * sd;
        const double sn = s.s2[i] * cd + s.c2[i] * sd;
        const double m = std::sqrt(c * c + sn * sn);
        s.c2[i] = c / m;
        s.s2[i] = sn / m;
    }
    s.time += dt;
}

namespace {

std::vector<double> u1_field(const MacroState& s, const Coefficients& co,
                             const AngularPotential& U1, int n_pts) {
    std::vector<double> h(s.rho.size(), 0.0);
    if (U1.empty()) return h;
    const U1Average avg(U1, co.r, n_pts);
    for (std::size_t i = 0; i < h.size(); ++i) h[i] = avg.at(s.c2[i], s.s2[i]);
    return h;
}

} // namespace

std::vector<double> stationary_residual_divergence(const MacroState& s, const Coefficients& co,
                                                   const AngularPotential& U1,
                                                   int u1_quad_points) {
    const int nx = s.nx, ny = s.ny;
    const double hx = s.hx(), hy = s.hy();
    const std::vector<double> h = u1_field(s, co, U1, u1_quad_points);

    // cell-centered gradients and a12-weighted products
    std::vector<double> gx(s.rho.size()), gy(s.rho.size()), qx(s.rho.size()), qy(s.rho.size());
    std::vector<double> a11(s.rho.size()), a22(s.rho.size());
    for (int iy = 0; iy < ny; ++iy) {
        for (int ix = 0; ix < nx; ++ix) {
            const std::size_t i = s.idx(ix, iy);
            const double cC = s.c2[i], sC = s.s2[i];
            auto rel = [&](int jx, int jy) {
                const std::size_t k = s.idx(jx, jy);
                return rel_angle(cC, sC, s.c2[k], s.s2[k]);
            };
            gx[i] = (rel(ix + 1, iy) - rel(ix - 1, iy)) / (2.0 * hx);
            gy[i] = (rel(ix, iy + 1) - rel(ix, iy - 1)) / (2.0 * hy);
            const double a12 = -co.alpha3 * sC;
            a11[i] = co.alpha2 - co.alpha3 * cC;
            a22[i] = co.alpha2 + co.alpha3 * cC;
            qx[i] = a12 * gx[i];
            qy[i] = a12 * gy[i];
        }
    }
    std::vector<double> res(s.rho.size());
    for (int iy = 0; iy < ny; ++iy) {
        for (int ix = 0; ix < nx; ++ix) {
            const std::size_t i = s.idx(ix, iy);
            const double cC = s.c2[i], sC = s.s2[i];
            auto rel = [&](int jx, int jy) {
                const std::size_t k = s.idx(jx, jy);
                return rel_angle(cC, sC, s.c2[k], s.s2[k]);
            };
            const std::size_t iE = s.idx(ix + 1, iy), iW = s.idx(ix - 1, iy);
            const std::size_t iN = s.idx(ix, iy + 1), iS = s.idx(ix, iy - 1);
            double r = 0.0;
            r += (0.5 * (a11[i] + a11[iE]) * rel(ix + 1, iy) +
                  0.5 * (a11[i] + a11[iW]) * rel(ix - 1, iy)) /
                 (hx * hx);
            r += (0.5 * (a22[i] + a22[iN]) * rel(ix, iy + 1) +
                  0.5 * (a22[i] + a22[iS]) * rel(ix, iy - 1)) /
                 (hy * hy);
            r += (qy[iE] - qy[iW]) / (2.0 * hx); // d/dx (a12 dtheta/dy)
            r += (qx[iN] - qx[iS]) / (2.0 * hy); // d/dy (a12 dtheta/dx)
            res[i] = r - co.alpha5 * h[i];
        }
    }
    return res;
}

std::vector<double> stationary_residual_expanded(const MacroState& s, const Coefficients& co,
                                                 const AngularPotential& U1,
                                                 int u1_quad_points) {
    const std::vector<double> h = u1_field(s, co, U1, u1_quad_points);
    std::vector<double> res(s.rho.size());
    for (int iy = 0; iy < s.ny; ++iy) {
        for (int ix = 0; ix < s.nx; ++ix) {
            const std::size_t i = s.idx(ix, iy);
            const double c = s.c2[i], sn = s.s2[i];
            const CellDerivs dd = cell_derivs(s, ix, iy);
            const double a11 = co.alpha2 - co.alpha3 * c;
            const double a12 = -co.alpha3 * sn;
            const double a22 = co.alpha2 + co.alpha3 * c;
            double r = a11 * dd.txx + 2.0 * a12 * dd.txy + a22 * dd.tyy;
            r += 2.0 * co.alpha3 *
                 (sn * dd.tx * dd.tx - 2.0 * c * dd.tx * dd.ty - sn * dd.ty * dd.ty);
            res[i] = r - co.alpha5 * h[i];
        }
    }
    return res;
}

StationarySolveReport stationary_theta_solve(const MacroState& init, const Coefficients& co,
                                             const AngularPotential& U1, double tol,
                                             int max_outer, int u1_quad_points) {
    if (!(co.alpha2 > std::abs(co.alpha3)))
        throw NotElliptic("stationary_theta_solve requires alpha2 > |alpha3|");
    const int nx = init.nx, ny = init.ny;
    const double hx = init.hx(), hy = init.hy();

    MacroState s = init;
    const double k1x = 2.0 * kPi / s.Lx, k1y = 2.0 * kPi / s.Ly;
    double sigma = (co.alpha2 + std::abs(co.alpha3)) * std::min(k1x * k1x, k1y * k1y);

    auto inf_norm = [](const std::vector<double>& v) {
        double m = 0.0;
        for (double x : v) m = std::max(m, std::abs(x));
        return m;
    };

    std::vector<double> res = stationary_residual_divergence(s, co, U1, u1_quad_points);
    double rnorm = inf_norm(res);
    std::vector<double> delta(s.rho.size(), 0.0);

    StationarySolveReport rep;
    for (int outer = 0; outer < max_outer; ++outer) {
        if (rnorm < tol) {
            rep.iterations = outer;
            rep.residual = rnorm;
            rep.theta.resize(s.rho.size());
            for (int iy = 0; iy < ny; ++iy)
                for (int ix = 0; ix < nx; ++ix) rep.theta[s.idx(ix, iy)] = s.theta0(ix, iy);
            return rep;
        }

        // Frozen-coefficient shifted linear problem (sigma I - L_axis) delta
        // = res, Gauss-Seidel to a fixed inner tolerance. The axis part of L
        // makes the system strictly diagonally dominant, so the sweeps
        // always converge; the cross terms stay lagged inside res.
        std::vector<double> a11(s.rho.size()), a22(s.rho.size());
        for (std::size_t i = 0; i < s.rho.size(); ++i) {
            a11[i] = co.alpha2 - co.alpha3 * s.c2[i];
            a22[i] = co.alpha2 + co.alpha3 * s.c2[i];
        }
        std::fill(delta.begin(), delta.end(), 0.0);
        const double inner_tol = 1e-10 * std::max(1.0, rnorm);
        for (int sweep = 0; sweep < 500; ++sweep) {
            double worst = 0.0;
            for (int iy = 0; iy < ny; ++iy) {
                for (int ix = 0; ix < nx; ++ix) {
                    const std::size_t i = s.idx(ix, iy);
                    const std::size_t iE = s.idx(ix + 1, iy), iW = s.idx(ix - 1, iy);
                    const std::size_t iN = s.idx(ix, iy + 1), iS = s.idx(ix, iy - 1);
                    const double aE = 0.5 * (a11[i] + a11[iE]) / (hx * hx);
                    const double aW = 0.5 * (a11[i] + a11[iW]) / (hx * hx);
                    const double aN = 0.5 * (a22[i] + a22[iN]) / (hy * hy);
                    const double aS = 0.5 * (a22[i] + a22[iS]) / (hy * hy);
                    const double diag = sigma + aE + aW + aN + aS;
                    const double off =
                        aE * delta[iE] + aW * delta[iW] + aN * delta[iN] + aS * delta[iS];
                    const double next = (res[i] + off) / diag;
                    worst = std::max(worst, std::abs(next - delta[i]) * diag);
                    delta[i] = next;
                }
            }
            if (worst < inner_tol) break;
        }

        // apply the correction through the embedding
        for (std::size_t i = 0; i < s.rho.size(); ++i) {
            const double cd = std::cos(2.0 * delta[i]);
            const double sd = std::sin(2.0 * delta[i]);
            const double c = s.c2[i] * cd - s.s2[i] * sd;
            const double sn = s.s2[i] * cd + s.c2[i] * sd;
            const double m = std::sqrt(c * c + sn * sn);
            s.c2[i] = c / m;
            s.s2[i] = sn / m;
        }

        res = stationary_residual_divergence(s, co, U1, u1_quad_points);
        const double next_norm = inf_norm(res);
        if (next_norm >= rnorm) sigma *= 2.0; // halve the effective step
        rnorm = next_norm;
    }
    throw MaxIterationsExceeded("stationary_theta_solve did not reach tol");
}

std::vector<EllipticityReport> ellipticity_sweep(const std::vector<double>& r_grid, double d,
                                                 double L) {
    std::vector<EllipticityReport> out;
    out.reserve(r_grid.size());
    for (double r : r_grid) {
        if (!(r > 0.0)) throw NegativeConcentration("ellipticity_sweep requires r > 0");
        const Coefficients co = coefficients_from_r(d, L, r);
        EllipticityReport rep;
        rep.r = r;
        rep.A_of_r = co.script_A;
        rep.c_of_r = co.c;
        rep.sum = co.script_A + co.c;
        rep.alpha2 = co.alpha2;
        rep.alpha3 = co.alpha3;
        rep.lambda_plus = co.alpha2 + std::abs(co.alpha3);
        rep.lambda_minus = co.alpha2 - std::abs(co.alpha3);
        rep.elliptic = rep.lambda_minus > 0.0;
        out.push_back(rep);
    }
    return out;
}

} // namespace fibrelax
