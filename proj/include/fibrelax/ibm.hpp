#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "fibrelax/angular_grid.hpp"
#include "fibrelax/energy.hpp"
#include "fibrelax/rng.hpp"
#include "fibrelax/state.hpp"

namespace fibrelax {

struct SimConfig {
    double dt = 1e-3;
    double t_end = 1.0;
    double box_x = 0.0;
    double box_y = 0.0;
    std::uint64_t seed = 0;
    double neighbor_cell_size = 0.0; // 0 -> fiber length L
    int output_stride = 1;
    int n_fibers = 0;
    int hist_bins = 64;
};

// Throws ConfigInvalid on violations (dt > 0, box > 2L, stride >= 1, ...).
void validate(const SimConfig& cfg, const ModelParams& p);

struct OrderParameters {
    double eta = 0.0;
    double theta_mean = 0.0;
    bool degenerate = false; // eta below resolution; theta_mean reported as 0
};

// Nematic order parameters of a set of line-angles:
// eta*(cos 2t_m, sin 2t_m) = weighted mean of (cos 2t_k, sin 2t_k).
OrderParameters order_parameters(const std::vector<double>& angles,
                                 const std::vector<double>* weights = nullptr);

// Histogram of angles on [-pi/2, pi/2), normalized against dtheta/pi
// (mean of bin values = 1).
AngularField empirical_angle_density(const std::vector<double>& angles, int n_bins);

struct ObservableRecord {
    double time = 0.0;
    double eta = 0.0;
    double theta_mean = 0.0;
    std::uint64_t link_count = 0;
    double energy = 0.0;
    std::vector<double> angle_histogram;
};

// One Euler-Maruyama step of the overdamped dynamics. Positions wrap
// periodically, angles wrap modulo pi to [-pi/2, pi/2), link offsets stay
// frozen. Throws UnstableStep when a deterministic displacement exceeds L/4.
void step(FiberState& s, const ModelParams& p, const SimConfig& cfg, const CounterRng& rng,
          std::uint64_t step_index);

// Poisson link events over one dt window: independent deletion with
// probability 1 - exp(-nu_d dt) per link, then formation with probability
// 1 - exp(-nu_f dt) per currently intersecting unlinked pair. New links
// freeze the intersection offsets at formation time. Every draw comes from
// the pair's own counter stream, so the result is independent of iteration
// order. cell_size tunes the neighbor search (0 selects L; anything smaller
// than L is widened to L so crossings are never missed).
void link_events(FiberState& s, const ModelParams& p, double dt, const CounterRng& rng,
                 std::uint64_t step_index, double cell_size = 0.0);

// Uniform positions, uniform angles, no links.
FiberState random_state(const SimConfig& cfg, const CounterRng& rng);

ObservableRecord observe(const FiberState& s, const ModelParams& p, int hist_bins);

// Full pipeline: init (or resume from a provided state), alternate
// step/link_events, record every output_stride steps (including t = 0).
struct IbmRunResult {
    std::vector<ObservableRecord> records;
    FiberState final_state;
    // Per-frame angle histogram accumulated in the frame of each snapshot's
    // own mean direction, over the trailing 20% of the run (used by the
    // cross-scale validation).
    AngularField recentered_density{};
    std::uint64_t recentered_frames = 0;
};
IbmRunResult run_ibm(const ModelParams& p, const SimConfig& cfg,
                     const std::optional<FiberState>& initial = std::nullopt);

} // namespace fibrelax
