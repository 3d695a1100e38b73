#pragma once

#include <cmath>
#include <cstdint>
#include <utility>

namespace fibrelax {

// Counter-based random number generator. Every draw is a pure function of
// (seed, stream, counter), so the simulation can assign one stream per fiber
// and one per pair-event lane and get results that do not depend on
// iteration or thread order. The mixer is the splitmix64 finalizer applied
// twice, which passes standard statistical batteries.
class CounterRng {
  public:
    explicit CounterRng(std::uint64_t seed) : seed_(seed) {}

    std::uint64_t seed() const { return seed_; }

    std::uint64_t bits(std::uint64_t stream, std::uint64_t counter) const {
        std::uint64_t x = seed_ ^ mix(stream + 0x9e3779b97f4a7c15ull);
        x = mix(x + counter * 0xbf58476d1ce4e5b9ull);
        return mix(x);
    }

    // Uniform in [0, 1).
    double uniform(std::uint64_t stream, std::uint64_t counter) const {
        return static_cast<double>(bits(stream, counter) >> 11) * 0x1.0p-53;
    }

    // Two independent standard normals per counter (Box-Muller).
    std::pair<double, double> gaussian_pair(std::uint64_t stream, std::uint64_t counter) const {
        const double u1 = 1.0 - uniform(stream, counter * 2);     // (0, 1]
        const double u2 = uniform(stream, counter * 2 + 1);
        const double rad = std::sqrt(-2.0 * std::log(u1));
        const double ang = 6.283185307179586476925286766559 * u2;
        return {rad * std::cos(ang), rad * std::sin(ang)};
    }

    static std::uint64_t stream_id(std::uint64_t kind, std::uint64_t id) {
        return (kind << 56) ^ id;
    }

  private:
    static std::uint64_t mix(std::uint64_t z) {
        z ^= z >> 30;
        z *= 0xbf58476d1ce4e5b9ull;
        z ^= z >> 27;
        z *= 0x94d049bb133111ebull;
        z ^= z >> 31;
        return z;
    }

    std::uint64_t seed_;
};

// Sequential view over one stream, for samplers that draw a variable number
// of uniforms (rejection loops, initial conditions).
class StreamRng {
  public:
    StreamRng(const CounterRng& base, std::uint64_t stream) : base_(base), stream_(stream) {}

    double uniform() { return base_.uniform(stream_, counter_++); }

    double gaussian() {
        if (have_spare_) {
            have_spare_ = false;
            return spare_;
        }
        auto [z0, z1] = base_.gaussian_pair(stream_, counter_++);
        spare_ = z1;
        have_spare_ = true;
        return z0;
    }

  private:
    CounterRng base_;
    std::uint64_t stream_;
    std::uint64_t counter_ = 0;
    double spare_ = 0.0;
    bool have_spare_ = false;
};

// Stream kinds used by the simulation; kept in one place so that runs are
// reproducible across refactorings.
namespace rng_kind {
inline constexpr std::uint64_t fiber_noise = 1;  // per-fiber Brownian increments
inline constexpr std::uint64_t pair_link = 2;    // per-pair link creation lane
inline constexpr std::uint64_t pair_unlink = 3;  // per-pair link deletion lane
inline constexpr std::uint64_t init = 4;         // initial condition
inline constexpr std::uint64_t sampler = 5;      // generic samplers
} // namespace rng_kind

} // namespace fibrelax
