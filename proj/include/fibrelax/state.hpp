#pragma once

#include <algorithm>
#include <cstdint>
#include <vector>

#include "fibrelax/geometry.hpp"

namespace fibrelax {

// A cross-link between fibers i < j. The attachment offsets are frozen at
// formation time and never change over the link lifetime.
struct Link {
    std::uint32_t i;
    std::uint32_t j;
    double ell_i;
    double ell_j;
};

inline bool operator<(const Link& a, const Link& b) {
    return a.i != b.i ? a.i < b.i : a.j < b.j;
}

// Positions, line-angles and the active link set of N fibers in a periodic
// box. Value type: copying it snapshots the full configuration.
struct FiberState {
    std::vector<double> x;
    std::vector<double> y;
    std::vector<double> theta; // always in [-pi/2, pi/2)
    std::vector<Link> links;   // sorted by (i, j); at most one per pair
    double box_x = 0.0;
    double box_y = 0.0;
    double time = 0.0;

    std::size_t size() const { return x.size(); }

    bool linked(std::uint32_t i, std::uint32_t j) const {
        Link probe{i, j, 0.0, 0.0};
        auto it = std::lower_bound(links.begin(), links.end(), probe);
        return it != links.end() && it->i == i && it->j == j;
    }
};

// Checks the structural invariants (angle range, index ordering, offset
// bounds, pair uniqueness); throws Error on violation. Used by tests and at
// snapshot load time.
void check_invariants(const FiberState& s, double L);

} // namespace fibrelax
