#pragma once

#include <vector>

#include "fibrelax/kinetic.hpp"
#include "fibrelax/params.hpp"

namespace fibrelax {

// Density and mean-orientation fields on a periodic nx*ny grid (row-major,
// cell centers). The orientation is stored through its double-angle
// embedding (cos 2t0, sin 2t0) so the mod-pi topology never produces branch
// cuts; it is renormalized to unit modulus after each update.
struct MacroState {
    int nx = 0, ny = 0;
    double Lx = 0.0, Ly = 0.0;
    std::vector<double> rho;
    std::vector<double> c2, s2;
    double time = 0.0;

    MacroState() = default;
    MacroState(int nx_, int ny_, double Lx_, double Ly_)
        : nx(nx_), ny(ny_), Lx(Lx_), Ly(Ly_), rho(static_cast<std::size_t>(nx_) * ny_, 0.0),
          c2(rho.size(), 1.0), s2(rho.size(), 0.0) {}

    double hx() const { return Lx / nx; }
    double hy() const { return Ly / ny; }
    std::size_t idx(int ix, int iy) const {
        return static_cast<std::size_t>((iy % ny + ny) % ny) * nx + ((ix % nx + nx) % nx);
    }
    double cell_x(int ix) const { return (ix + 0.5) * hx(); }
    double cell_y(int iy) const { return (iy + 0.5) * hy(); }

    double theta0(int ix, int iy) const;
    void set_theta0(int ix, int iy, double theta);
};

// Total mass sum(rho) * hx * hy, compensated summation.
double total_mass(const MacroState& s);

// Drift velocities (components of grad U0) sampled at east/north faces.
struct DriftVelocities {
    std::vector<double> vx_east;  // at ((ix+1) hx, (iy+1/2) hy)
    std::vector<double> vy_north; // at ((ix+1/2) hx, (iy+1) hy)
};
DriftVelocities make_drift(const MacroState& s, const SpatialPotential& U0);

// One conservative finite-volume step of
//   d rho/dt = div(grad(U0) rho) + d Laplace(rho)
// (centered diffusion, upwinded drift). Total mass is preserved to within a
// few ULP per step. Throws CFLViolation when dt exceeds the stability bound.
void rho_step(MacroState& s, const DriftVelocities* drift, double d, double dt);
void rho_step(MacroState& s, const SpatialPotential& U0, double d, double dt);

// Quasilinear coefficient matrix A(t0) of the orientation equation.
struct Mat2 {
    double a11, a12, a21, a22;
};
Mat2 matrix_A(double theta0, double alpha2, double alpha3);

// One explicit Euler step of the mean-orientation equation (all derivative
// terms of the quasilinear system plus the angular-potential relaxation).
// <dU1/dtheta> is averaged per cell against the local equilibrium with
// concentration coeffs.r. Throws DensityFloorViolated (rho < 1e-8) and
// CFLViolation.
void theta_step(MacroState& s, const Coefficients& coeffs, const SpatialPotential& U0,
                const AngularPotential& U1, double dt,
                int u1_quad_points = 128);

// Stationary homogeneous problem: solve
//   sum_ij d_i(a_ij(t0) d_j t0) = alpha5 <dU1/dtheta>
// by a damped fixed-point iteration: freeze coefficients at the current
// iterate, solve the shifted linear problem (sigma I - L) with Gauss-Seidel
// sweeps to a fixed inner tolerance, relax; sigma doubles whenever the
// nonlinear residual fails to decrease. Requires ellipticity
// (alpha2 > |alpha3|), else NotElliptic; MaxIterationsExceeded after
// max_outer iterations.
struct StationarySolveReport {
    std::vector<double> theta;
    int iterations = 0;
    double residual = 0.0;
};
StationarySolveReport stationary_theta_solve(const MacroState& init, const Coefficients& coeffs,
                                             const AngularPotential& U1, double tol,
                                             int max_outer = 20000, int u1_quad_points = 128);

// Independent evaluation of the stationary residual (divergence form with
// face-averaged coefficients) and a second discretization of the same
// operator (expanded quasilinear form); both are used by tests.
std::vector<double> stationary_residual_divergence(const MacroState& s, const Coefficients& co,
                                                   const AngularPotential& U1,
                                                   int u1_quad_points = 128);
std::vector<double> stationary_residual_expanded(const MacroState& s, const Coefficients& co,
                                                 const AngularPotential& U1,
                                                 int u1_quad_points = 128);

struct EllipticityReport {
    double r = 0.0;
    double A_of_r = 0.0;
    double c_of_r = 0.0;
    double sum = 0.0; // A(r) + c(r)
    double alpha2 = 0.0;
    double alpha3 = 0.0;
    double lambda_plus = 0.0;  // alpha2 + |alpha3|
    double lambda_minus = 0.0; // alpha2 - |alpha3|
    bool elliptic = false;     // lambda_minus > 0
};
std::vector<EllipticityReport> ellipticity_sweep(const std::vector<double>& r_grid, double d,
                                                 double L);

} // namespace fibrelax
