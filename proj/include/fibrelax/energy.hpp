#pragma once

#include <vector>

#include "fibrelax/params.hpp"
#include "fibrelax/state.hpp"

namespace fibrelax {

// Spring energy of one link plus its gradient with respect to the first
// fiber. Gradients with respect to the second fiber follow from the
// symmetry V(c1, c2) = V(c2, c1).
struct SpringGrad {
    double V;
    Vec2 dV_dx1;
    double dV_dtheta1;
};

// V = (kappa/2) |x1 + l1 w(t1) - x2 - l2 w(t2)|^2. The displacement between
// the two attachment points may be passed pre-wrapped (minimum image) via
// the overload taking dx, dy = x1 - x2.
SpringGrad spring_energy(const Vec2& x1, double theta1, double ell1, const Vec2& x2,
                         double theta2, double ell2, double kappa);
SpringGrad spring_energy_displaced(double dx, double dy, double theta1, double ell1,
                                   double theta2, double ell2, double kappa);

// Alignment potential b = alpha |sin(t1 - t2)|^beta and its t1-derivative.
// At exact alignment the derivative is defined as 0 (minimum of the kink).
struct AlignGrad {
    double b;
    double db_dtheta1;
};
AlignGrad alignment_energy(double theta1, double theta2, double alpha, double beta);

// Deterministic free energy W_links + W_ext + W_align of a configuration
// (pair geometry wrapped with the minimum-image convention).
double total_energy(const FiberState& s, const ModelParams& p);

// Gradient of the deterministic energy, assembled in one pass:
//   gx, gy = d(W_links + W_ext)/dX_i       (positions do not feel W_align)
//   gt     = d(W_links + W_ext + W_align)/dtheta_i
// The steepest-descent velocities are -mu*(gx,gy) and -lambda*gt.
struct EnergyGradients {
    std::vector<double> gx;
    std::vector<double> gy;
    std::vector<double> gt;
    double energy;
};
EnergyGradients assemble_gradients(const FiberState& s, const ModelParams& p);

} // namespace fibrelax
