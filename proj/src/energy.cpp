#include "fibrelax/energy.hpp"

#include <cmath>

namespace fibrelax {

SpringGrad spring_energy_displaced(double dx, double dy, double theta1, double ell1,
                                   double theta2, double ell2, double kappa) {
    const Vec2 w1 = direction(theta1);
    const Vec2 w2 = direction(theta2);
    const double ex = dx + ell1 * w1[0] - ell2 * w2[0];
    const double ey = dy + ell1 * w1[1] - ell2 * w2[1];
    SpringGrad g;
    g.V = 0.5 * kappa * (ex * ex + ey * ey);
    g.dV_dx1 = {kappa * ex, kappa * ey};
    // d/dtheta1 of ell1*w(theta1) is ell1*normal(theta1)
    g.dV_dtheta1 = kappa * ell1 * (ex * (-w1[1]) + ey * w1[0]);
    return g;
}

SpringGrad spring_energy(const Vec2& x1, double theta1, double ell1, const Vec2& x2,
                         double theta2, double ell2, double kappa) {
    return spring_energy_displaced(x1[0] - x2[0], x1[1] - x2[1], theta1, ell1, theta2, ell2,
                                   kappa);
}

AlignGrad alignment_energy(double theta1, double theta2, double alpha, double beta) {
    const double dth = theta1 - theta2;
    const double s = std::sin(dth);
    const double as = std::abs(s);
    AlignGrad g;
    if (as == 0.0) {
        g.b = 0.0;
        g.db_dtheta1 = 0.0;
        return g;
    }
    g.b = alpha * std::pow(as, beta);
    const double sgn = s > 0.0 ? 1.0 : -1.0;
    g.db_dtheta1 = alpha * beta * std::pow(as, beta - 1.0) * sgn * std::cos(dth);
    return g;
}

namespace {

double external_energy(const FiberState& s, const ModelParams& p, std::size_t i) {
    double u = 0.0;
    if (!p.U0.empty()) u += p.U0.value(s.x[i], s.y[i]);
    if (!p.U1.empty()) u += p.U1.value(s.theta[i]);
    return u;
}

} // namespace

double total_energy(const FiberState& s, const ModelParams& p) {
    double w = 0.0;
    for (const Link& k : s.links) {
        const double dx = min_image(s.x[k.i], s.x[k.j], s.box_x);
        const double dy = min_image(s.y[k.i], s.y[k.j], s.box_y);
        w += 0.5 * spring_energy_displaced(dx, dy, s.theta[k.i], k.ell_i, s.theta[k.j], k.ell_j,
                                           p.kappa)
                       .V;
        w += 0.5 * alignment_energy(s.theta[k.i], s.theta[k.j], p.alpha, p.beta).b;
    }
    for (std::size_t i = 0; i < s.size(); ++i) w += external_energy(s, p, i);
    return w;
}

EnergyGradients assemble_gradients(const FiberState& s, const ModelParams& p) {
    const std::size_t n = s.size();
    EnergyGradients g;
    g.gx.assign(n, 0.0);
    g.gy.assign(n, 0.0);
    g.gt.assign(n, 0.0);
    g.energy = 0.0;

    for (const Link& k : s.links) {
        const double dx = min_image(s.x[k.i], s.x[k.j], s.box_x);
        const double dy = min_image(s.y[k.i], s.y[k.j], s.box_y);
        const SpringGrad sp =
            spring_energy_displaced(dx, dy, s.theta[k.i], k.ell_i, s.theta[k.j], k.ell_j, p.kappa);
        // W_links carries a global factor 1/2; gradients w.r.t. fiber j from
        // symmetry: dV/dx2 = -dV/dx1, dV/dtheta2 evaluated with swapped roles.
        g.gx[k.i] += 0.5 * sp.dV_dx1[0];
        g.gy[k.i] += 0.5 * sp.dV_dx1[1];
        g.gx[k.j] -= 0.5 * sp.dV_dx1[0];
        g.gy[k.j] -= 0.5 * sp.dV_dx1[1];
        g.gt[k.i] += 0.5 * sp.dV_dtheta1;
        const Vec2 w2 = direction(s.theta[k.j]);
        const double ex = sp.dV_dx1[0]; // kappa * (attachment displacement)
        const double ey = sp.dV_dx1[1];
        g.gt[k.j] += 0.5 * (-k.ell_j) * (ex * (-w2[1]) + ey * w2[0]);
        g.energy += 0.5 * sp.V;

        const AlignGrad al = alignment_energy(s.theta[k.i], s.theta[k.j], p.alpha, p.beta);
        g.gt[k.i] += 0.5 * al.db_dtheta1;
        g.gt[k.j] -= 0.5 * al.db_dtheta1; // db/dtheta2 = -db/dtheta1
        g.energy += 0.5 * al.b;
    }

    if (!p.U0.empty()) {
        for (std::size_t i = 0; i < n; ++i) {
            const Vec2 du = p.U0.grad(s.x[i], s.y[i]);
            g.gx[i] += du[0];
            g.gy[i] += du[1];
            g.energy += p.U0.value(s.x[i], s.y[i]);
        }
    }
    if (!p.U1.empty()) {
        for (std::size_t i = 0; i < n; ++i) {
            g.gt[i] += p.U1.dtheta(s.theta[i]);
            g.energy += p.U1.value(s.theta[i]);
        }
    }
    return g;
}

void check_invariants(const FiberState& s, double L) {
    const std::size_t n = s.size();
    if (s.y.size() != n || s.theta.size() != n) throw Error("state arrays have unequal lengths");
    for (std::size_t i = 0; i < n; ++i) {
        if (!(s.theta[i] >= -kPi / 2.0 && s.theta[i] < kPi / 2.0))
            throw Error("angle outside [-pi/2, pi/2)");
    }
    for (std::size_t k = 0; k < s.links.size(); ++k) {
        const Link& l = s.links[k];
        if (!(l.i < l.j) || l.j >= n) throw Error("link indices must satisfy i < j < N");
        if (std::abs(l.ell_i) > L / 2.0 || std::abs(l.ell_j) > L / 2.0)
            throw Error("link offset exceeds L/2");
        if (k > 0 && !(s.links[k - 1] < l)) throw Error("links must be sorted and unique per pair");
    }
}

} // namespace fibrelax
