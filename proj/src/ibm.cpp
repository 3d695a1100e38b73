#include "fibrelax/ibm.hpp"

#include <algorithm>
#include <cmath>

#include "fibrelax/errors.hpp"
#include "fibrelax/simd.hpp"

namespace fibrelax {

void validate(const SimConfig& cfg, const ModelParams& p) {
    if (!(cfg.dt > 0.0)) throw ConfigInvalid("sim.dt", "must be > 0");
    if (!(cfg.t_end >= 0.0)) throw ConfigInvalid("sim.t_end", "must be >= 0");
    if (!(cfg.box_x > 2.0 * p.L) || !(cfg.box_y > 2.0 * p.L))
        throw ConfigInvalid("sim.box", "extents must exceed 2L");
    if (cfg.output_stride < 1) throw ConfigInvalid("sim.output_stride", "must be >= 1");
    if (cfg.n_fibers < 1) throw ConfigInvalid("sim.n_fibers", "must be >= 1");
    if (cfg.hist_bins < 8) throw ConfigInvalid("sim.hist_bins", "must be >= 8");
    if (cfg.neighbor_cell_size < 0.0)
        throw ConfigInvalid("sim.neighbor_cell_size", "must be >= 0 (0 selects L)");
}

OrderParameters order_parameters(const std::vector<double>& angles,
                                 const std::vector<double>* weights) {
    if (angles.empty()) throw EmptySample("order_parameters needs at least one angle");
    double a = 0.0, b = 0.0, wsum = 0.0;
    for (std::size_t k = 0; k < angles.size(); ++k) {
        const double w = weights ? (*weights)[k] : 1.0;
        a += w * std::cos(2.0 * angles[k]);
        b += w * std::sin(2.0 * angles[k]);
        wsum += w;
    }
    a /= wsum;
    b /= wsum;
    OrderParameters op;
    op.eta = std::sqrt(a * a + b * b);
    if (op.eta <= 1e-12) {
        // isotropic within resolution: the mean direction is undefined
        op.degenerate = true;
        op.theta_mean = 0.0;
    } else {
        op.theta_mean = wrap_angle(0.5 * std::atan2(b, a));
    }
    return op;
}

AngularField empirical_angle_density(const std::vector<double>& angles, int n_bins) {
    if (angles.empty()) throw EmptySample("empirical_angle_density needs samples");
    if (n_bins < 8) throw ConfigInvalid("n_bins", "must be >= 8");
    AngularGrid g(n_bins);
    AngularField f(g);
    for (double th : angles) {
        const double w = wrap_angle(th);
        int b = static_cast<int>((w + kPi / 2.0) / g.dtheta());
        b = std::clamp(b, 0, n_bins - 1);
        f.v[b] += 1.0;
    }
    // normalize so that the dtheta/pi integral (mean of bins) equals 1
    const double scale = static_cast<double>(n_bins) / static_cast<double>(angles.size());
    for (double& x : f.v) x *= scale;
    return f;
}

void step(FiberState& s, const ModelParams& p, const SimConfig& cfg, const CounterRng& rng,
          std::uint64_t step_index) {
    const std::size_t n = s.size();
    const EnergyGradients g = assemble_gradients(s, p);

    const double dt = cfg.dt;
    const double limit = 0.25 * p.L;
    for (std::size_t i = 0; i < n; ++i) {
        const double dx = p.mu * g.gx[i] * dt;
        const double dy = p.mu * g.gy[i] * dt;
        if (std::abs(dx) > limit || std::abs(dy) > limit)
            throw UnstableStep("deterministic displacement exceeded L/4; reduce dt");
    }

    const double sig_x = std::sqrt(2.0 * p.mu * p.d * dt);
    const double sig_t = std::sqrt(2.0 * p.lambda * p.d * dt);
    for (std::size_t i = 0; i < n; ++i) {
        const std::uint64_t stream = CounterRng::stream_id(rng_kind::fiber_noise, i);
        const auto [zx, zy] = rng.gaussian_pair(stream, step_index * 2);
        const auto [zt, unused] = rng.gaussian_pair(stream, step_index * 2 + 1);
        (void)unused;
        s.x[i] = wrap_coord(s.x[i] - p.mu * g.gx[i] * dt + sig_x * zx, s.box_x);
        s.y[i] = wrap_coord(s.y[i] - p.mu * g.gy[i] * dt + sig_x * zy, s.box_y);
        s.theta[i] = wrap_angle(s.theta[i] - p.lambda * g.gt[i] * dt + sig_t * zt);
    }
    s.time += dt;
}

namespace {

// Uniform cell list over the periodic box; cells are at least `cell` wide so
// any two fibers closer than `cell` sit in adjacent cells.
struct CellList {
    int ncx, ncy;
    double wx, wy;
    std::vector<std::vector<std::uint32_t>> cells;

    CellList(const FiberState& s, double cell) {
        ncx = std::max(1, static_cast<int>(s.box_x / cell));
        ncy = std::max(1, static_cast<int>(s.box_y / cell));
        wx = s.box_x / ncx;
        wy = s.box_y / ncy;
        cells.assign(static_cast<std::size_t>(ncx) * ncy, {});
        for (std::uint32_t i = 0; i < s.size(); ++i) {
            int cx = std::min(ncx - 1, static_cast<int>(s.x[i] / wx));
            int cy = std::min(ncy - 1, static_cast<int>(s.y[i] / wy));
            cells[static_cast<std::size_t>(cy) * ncx + cx].push_back(i);
        }
    }

    bool usable() const { return ncx >= 3 && ncy >= 3; }

    template <class Fn> void for_candidate_pairs(Fn&& fn) const {
        for (int cy = 0; cy < ncy; ++cy) {
            for (int cx = 0; cx < ncx; ++cx) {
                const auto& base = cells[static_cast<std::size_t>(cy) * ncx + cx];
                if (base.empty()) continue;
                for (int oy = -1; oy <= 1; ++oy) {
                    for (int ox = -1; ox <= 1; ++ox) {
                        const int nx = (cx + ox + ncx) % ncx;
                        const int ny = (cy + oy + ncy) % ncy;
                        const auto& other = cells[static_cast<std::size_t>(ny) * ncx + nx];
                        for (std::uint32_t i : base)
                            for (std::uint32_t j : other)
                                if (j > i) fn(i, j);
                    }
                }
            }
        }
    }
};

template <class Fn>
void for_each_candidate_pair(const FiberState& s, double cell, Fn&& fn) {
    CellList cl(s, cell);
    if (cl.usable()) {
        cl.for_candidate_pairs(fn);
    } else {
        const std::uint32_t n = static_cast<std::uint32_t>(s.size());
        for (std::uint32_t i = 0; i < n; ++i)
            for (std::uint32_t j = i + 1; j < n; ++j) fn(i, j);
    }
}

} // namespace

void link_events(FiberState& s, const ModelParams& p, double dt, const CounterRng& rng,
                 std::uint64_t step_index, double cell_size) {
    const std::uint32_t n = static_cast<std::uint32_t>(s.size());
    auto pair_id = [n](std::uint32_t i, std::uint32_t j) {
        return static_cast<std::uint64_t>(i) * n + j;
    };

    // deletion
    if (p.nu_d > 0.0 && !s.links.empty()) {
        const double p_del = -std::expm1(-p.nu_d * dt);
        auto dead = [&](const Link& k) {
            const std::uint64_t stream = CounterRng::stream_id(rng_kind::pair_unlink, pair_id(k.i, k.j));
            return rng.uniform(stream, step_index) < p_del;
        };
        s.links.erase(std::remove_if(s.links.begin(), s.links.end(), dead), s.links.end());
    }

    // formation over currently intersecting, currently unlinked pairs
    if (p.nu_f > 0.0) {
        const double p_form = -std::expm1(-p.nu_f * dt);
        const double cell = std::max(cell_size, p.L); // adjacent cells must cover crossings
        const double half_L = 0.5 * p.L;
        std::vector<double> cth(n), sth(n);
        for (std::uint32_t i = 0; i < n; ++i) {
            cth[i] = std::cos(s.theta[i]);
            sth[i] = std::sin(s.theta[i]);
        }
        std::vector<Link> fresh;
        for_each_candidate_pair(s, cell, [&](std::uint32_t i, std::uint32_t j) {
            const double dx = min_image(s.x[j], s.x[i], s.box_x);
            const double dy = min_image(s.y[j], s.y[i], s.box_y);
            // sin(theta_j - theta_i) from the cached tables
            const double sdiff = sth[j] * cth[i] - cth[j] * sth[i];
            if (std::abs(sdiff) < kParallelEps) return;
            const double l_ij = (dx * sth[j] - dy * cth[j]) / sdiff;
            if (std::abs(l_ij) > half_L) return;
            const double l_ji = (-dx * sth[i] + dy * cth[i]) / (-sdiff);
            if (std::abs(l_ji) > half_L) return;
            if (s.linked(i, j)) return;
            const std::uint64_t stream = CounterRng::stream_id(rng_kind::pair_link, pair_id(i, j));
            if (rng.uniform(stream, step_index) >= p_form) return;
            fresh.push_back({i, j, l_ij, l_ji});
        });
        if (!fresh.empty()) {
            s.links.insert(s.links.end(), fresh.begin(), fresh.end());
            std::sort(s.links.begin(), s.links.end());
        }
    }
}

FiberState random_state(const SimConfig& cfg, const CounterRng& rng) {
    FiberState s;
    const int n = cfg.n_fibers;
    s.x.resize(n);
    s.y.resize(n);
    s.theta.resize(n);
    s.box_x = cfg.box_x;
    s.box_y = cfg.box_y;
    StreamRng init(rng, CounterRng::stream_id(rng_kind::init, 0));
    for (int i = 0; i < n; ++i) {
        s.x[i] = cfg.box_x * init.uniform();
        s.y[i] = cfg.box_y * init.uniform();
        s.theta[i] = wrap_angle(-kPi / 2.0 + kPi * init.uniform());
    }
    return s;
}

ObservableRecord observe(const FiberState& s, const ModelParams& p, int hist_bins) {
    ObservableRecord rec;
    rec.time = s.time;
    const OrderParameters op = order_parameters(s.theta);
    rec.eta = op.eta;
    rec.theta_mean = op.theta_mean;
    rec.link_count = s.links.size();
    rec.energy = total_energy(s, p);
    rec.angle_histogram = empirical_angle_density(s.theta, hist_bins).v;
    return rec;
}

IbmRunResult run_ibm(const ModelParams& p, const SimConfig& cfg,
                     const std::optional<FiberState>& initial) {
    validate(p);
    validate(cfg, p);
    const CounterRng rng(cfg.seed);

    IbmRunResult out;
    FiberState s = initial ? *initial : random_state(cfg, rng);
    if (initial) check_invariants(s, p.L);

    const std::uint64_t n_steps = static_cast<std::uint64_t>(std::llround(cfg.t_end / cfg.dt));
    const std::uint64_t tail_start =
        n_steps - std::min<std::uint64_t>(n_steps, n_steps / 5); // trailing 20%

    AngularGrid hist_grid(cfg.hist_bins);
    out.recentered_density = AngularField(hist_grid);

    auto accumulate_recentered = [&](const FiberState& st) {
        const OrderParameters op = order_parameters(st.theta);
        std::vector<double> shifted(st.theta.size());
        for (std::size_t i = 0; i < st.theta.size(); ++i)
            shifted[i] = wrap_angle(st.theta[i] - op.theta_mean);
        const AngularField h = empirical_angle_density(shifted, cfg.hist_bins);
        for (int j = 0; j < h.n; ++j) out.recentered_density.v[j] += h.v[j];
        out.recentered_frames += 1;
    };

    out.records.push_back(observe(s, p, cfg.hist_bins));
    const double cell = std::max(cfg.neighbor_cell_size, p.L);
    for (std::uint64_t k = 0; k < n_steps; ++k) {
        step(s, p, cfg, rng, k);
        link_events(s, p, cfg.dt, rng, k, cell);
        if ((k + 1) % static_cast<std::uint64_t>(cfg.output_stride) == 0 || k + 1 == n_steps) {
            out.records.push_back(observe(s, p, cfg.hist_bins));
            if (k + 1 > tail_start) accumulate_recentered(s);
        }
    }
    if (out.recentered_frames > 0)
        for (double& v : out.recentered_density.v) v /= static_cast<double>(out.recentered_frames);
    out.final_state = std::move(s);
    return out;
}

} // namespace fibrelax
