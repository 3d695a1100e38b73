#include "fibrelax/params.hpp"

#include <cmath>

#include "fibrelax/errors.hpp"

namespace fibrelax {

void validate(const ModelParams& p) {
    auto positive = [](double v, const char* name) {
        if (!(v > 0.0)) throw ConfigInvalid(name, "must be > 0");
    };
    auto nonneg = [](double v, const char* name) {
        if (!(v >= 0.0)) throw ConfigInvalid(name, "must be >= 0");
    };
    positive(p.mu, "model.mu");
    positive(p.lambda, "model.lambda");
    positive(p.L, "model.L");
    nonneg(p.kappa, "model.kappa");
    nonneg(p.alpha, "model.alpha");
    nonneg(p.d, "model.d");
    nonneg(p.nu_f, "model.nu_f");
    nonneg(p.nu_d, "model.nu_d");
    nonneg(p.xi, "model.xi");
    nonneg(p.gamma, "model.gamma");
    if (!(p.beta >= 1.0)) throw ConfigInvalid("model.beta", "must be >= 1");
    if (!p.U1.empty()) {
        // pi-periodicity checked by sampling
        for (int k = 0; k < 17; ++k) {
            const double th = -kPi / 2.0 + kPi * (k + 0.21) / 17.0;
            const double a = p.U1.value(th);
            const double b = p.U1.value(th + kPi);
            if (std::abs(a - b) > 1e-9 * (1.0 + std::abs(a)))
                throw ConfigInvalid("model.U1", "must be pi-periodic");
        }
    }
}

ModelParams nondimensionalize(const ModelParams& p) {
    if (!(p.mu > 0.0) || !(p.lambda > 0.0))
        throw NonPositiveMobility("nondimensionalize requires mu > 0 and lambda > 0");
    const double x0sq = p.mu / p.lambda;
    const double x0 = std::sqrt(x0sq);
    const double t0 = p.mu;
    const double energy_scale = t0 * t0 / x0sq; // 1 / U_0

    ModelParams q = p;
    q.mu = 1.0;
    q.lambda = 1.0;
    q.kappa = p.kappa * t0 * t0;
    q.alpha = p.alpha * energy_scale;
    q.d = p.d * energy_scale;
    q.nu_f = p.nu_f * t0;
    q.nu_d = p.nu_d * t0;
    q.L = p.L / x0;
    q.xi = p.xi;
    // gamma carries the units of an f-moment (1/x0^2), so that the derived
    // concentration xi*alpha*L^2*gamma/(4d) stays invariant.
    q.gamma = p.gamma * x0sq;
    if (!p.U0.empty()) {
        auto val = p.U0.value;
        auto grd = p.U0.grad;
        q.U0.value = [=](double x, double y) { return energy_scale * val(x0 * x, x0 * y); };
        q.U0.grad = [=](double x, double y) {
            Vec2 g = grd(x0 * x, x0 * y);
            return Vec2{energy_scale * x0 * g[0], energy_scale * x0 * g[1]};
        };
    }
    if (!p.U1.empty()) {
        auto val = p.U1.value;
        auto der = p.U1.dtheta;
        q.U1.value = [=](double th) { return energy_scale * val(th); };
        q.U1.dtheta = [=](double th) { return energy_scale * der(th); };
    }
    return q;
}

} // namespace fibrelax
