#pragma once

#include <array>
#include <vector>

#include "fibrelax/angular_grid.hpp"
#include "fibrelax/rng.hpp"

namespace fibrelax {

inline constexpr int kDefaultQuadPoints = 256;
inline constexpr int kIdentityQuadPoints = 1024;

// Z^(p)(r) = integral of (cos 2t)^p exp(r cos 2t) dt/pi over a period,
// by periodic trapezoid quadrature. p in {0,...,4}.
double partition_function(double r, int p = 0, int n_theta = kDefaultQuadPoints);

// Order parameter of the angular equilibrium at concentration r,
// c(r) = Z'(r)/Z(r); c(0) = 0, c -> 1 as r -> infinity.
double vm_order_parameter(double r, int n_theta = kDefaultQuadPoints);

// Inverse of c by bisection on [0, r_max]; tolerance on r.
double vm_concentration_from_order(double eta, double r_max = 200.0, double tol = 1e-10);

// Macroscopic coefficient bundle derived from the concentration r.
struct Coefficients {
    double r = 0.0;
    double Z = 1.0;
    double c = 0.0;
    double script_A = 0.0; // 1/(4 Z^2) - 1 + (3/2) c/r
    double alpha1 = 0.0;   // 1 - 1/Z^2
    double alpha2 = 0.0;
    double alpha3 = 0.0;
    double alpha4 = 0.0;
    double alpha5 = 0.0;
    double C1 = 0.0; // alpha L^2 nu_f / (2 nu_d)
    double C2 = 0.0; // alpha L^4 nu_f / (48 nu_d)
};

// Coefficients at given (d, L, r); C1, C2 are left zero (they need rates).
// Throws IsotropicSingular at r = 0 where alpha5 = 1/alpha1 blows up.
Coefficients coefficients_from_r(double d, double L, double r,
                                 int n_theta = kDefaultQuadPoints);

// Full bundle from the model data; r = xi*alpha*L^2*gamma / (4 d).
Coefficients coefficients(double d, double L, double xi, double alpha, double gamma, double nu_f,
                          double nu_d, int n_theta = kDefaultQuadPoints);

// Angular equilibrium density exp(r cos 2(t - t0)) / Z(r); integrates to 1
// in the dtheta/pi measure.
double vm_pdf(double theta, double theta0, double r);
AngularField vm_field(const AngularGrid& g, double theta0, double r);

// n independent draws by rejection sampling from the uniform proposal.
std::vector<double> vm_sample(StreamRng& rng, double theta0, double r, std::size_t n);

// Mean-field alignment potential of an angular density, evaluated through
// its first circular moments (exact on the grid):
//   Phi[f](t) = (C1/2) (rho_f - eta_f cos 2(t - t_f)).
AngularField mean_field_potential(const AngularField& f, double C1);

// Collision operator Q(f) = d f'' + xi ((Phi[f])' f)', discretized in
// conservative flux form so the discrete mean of Q vanishes identically.
AngularField collision_operator(const AngularField& f, double d, double xi, double C1);

// Pair alignment tensor B(t1,t2) = sin 2(t1-t2) [w1 (x) w1 + w2 (x) w2].
std::array<std::array<double, 2>, 2> pair_alignment_tensor(double theta1, double theta2);

// Spatial coupling term G[f](x, t1) = C2 sum_ij d^2/dx_i dx_j of the
// B_ij-weighted angular average of f, on a periodic nx*ny grid with an
// angular grid attached (f indexed cell-major: f[(iy*nx+ix)*n + j]).
struct SpatialAngularField {
    int nx = 0, ny = 0;
    double hx = 0.0, hy = 0.0;
    AngularGrid grid;
    std::vector<double> v;

    SpatialAngularField(int nx_, int ny_, double hx_, double hy_, const AngularGrid& g)
        : nx(nx_), ny(ny_), hx(hx_), hy(hy_), grid(g),
          v(static_cast<std::size_t>(nx_) * ny_ * g.n, 0.0) {}
    double& at(int ix, int iy, int j) {
        return v[(static_cast<std::size_t>(iy) * nx + ix) * grid.n + j];
    }
    double at(int ix, int iy, int j) const {
        return v[(static_cast<std::size_t>(iy) * nx + ix) * grid.n + j];
    }
};
SpatialAngularField spatial_coupling_G(const SpatialAngularField& f, double C2);

// Odd pi-periodic profile g of the generalized collision invariant,
// sampled on the grid. Satisfies (M0 g')' = -sin(2t) M0 with g(0) =
// g(pi/2) = 0 enforced exactly. The GCI family is psi = C + beta*g(t-t0).
AngularField gci_profile(const AngularGrid& g, double r);

// Closed-form derivative g'(t) = (1/2r)(1 - 1/(M0(t) Z^2)).
double gci_profile_derivative(double theta, double r, int n_theta = kDefaultQuadPoints);

// Quadrature check of the closed-form moment identities of the equilibrium
// family (plus the T1/T2 averages used by the coefficient derivation).
struct MomentIdentityReport {
    struct Entry {
        const char* name;
        double quadrature;
        double closed_form;
    };
    std::vector<Entry> entries;
    double max_abs_mismatch = 0.0;
};
MomentIdentityReport check_moment_identities(double r, int n_theta = kIdentityQuadPoints);

} // namespace fibrelax
