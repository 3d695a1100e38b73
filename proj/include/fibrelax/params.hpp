#pragma once

#include <array>
#include <functional>

#include "fibrelax/geometry.hpp"

namespace fibrelax {

// External spatial potential U0(x, y): value plus gradient. An empty value
// means U0 == 0.
struct SpatialPotential {
    std::function<double(double, double)> value;
    std::function<Vec2(double, double)> grad;

    bool empty() const { return !value; }
};

// External angular potential U1(theta), pi-periodic: value plus derivative.
struct AngularPotential {
    std::function<double(double)> value;
    std::function<double(double)> dtheta;

    bool empty() const { return !value; }
};

struct ModelParams {
    double mu = 1.0;      // positional mobility
    double lambda = 1.0;  // angular mobility
    double kappa = 1.0;   // link spring stiffness
    double alpha = 1.0;   // flexural modulus of the alignment torque
    double beta = 1.0;    // alignment exponent
    double d = 1.0;       // noise amplitude
    double nu_f = 1.0;    // link formation rate
    double nu_d = 1.0;    // link deletion rate
    double L = 1.0;       // fiber length
    double xi = 1.0;      // link-to-fiber ratio K/N
    double gamma = 1.0;   // rate-ratio constant (nu_f/nu_d times local order)
    SpatialPotential U0;
    AngularPotential U1;
};

// Checks the parameter invariants; throws ConfigInvalid naming the field.
// Rates and stiffnesses may be zero (several degenerate regimes are useful:
// no linking, no springs, no torque); mobilities and L must be positive.
void validate(const ModelParams& p);

// Rescales to the units in which both mobilities equal one
// (x0^2 = mu/lambda, t0 = mu). Potentials are wrapped so that
// U'(x') = (t0^2/x0^2) U(x0 x'). Throws NonPositiveMobility.
ModelParams nondimensionalize(const ModelParams& p);

} // namespace fibrelax
