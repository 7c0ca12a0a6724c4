// Deterministic random streams for the simulator.
//
// Generator: xoshiro256** (Blackman & Vigna) seeded from a single 64-bit
// value via splitmix64. Both are fixed-width integer arithmetic only, so a
// given seed yields bit-identical sequences on every conforming platform.
//
// Draw accounting: every raw 64-bit output increments draws(). Higher-level
// operations freeze their per-call draw counts against this counter, which
// is what makes "consumes no randomness" claims testable.

#pragma once

#include <array>
#include <bit>
#include <cstdint>
#include <stdexcept>

namespace pdpa {

// One splitmix64 step: advances the state, returns the next output.
inline std::uint64_t splitmix64_next(std::uint64_t& state) noexcept {
    std::uint64_t z = (state += 0x9E3779B97F4A7C15ull);
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
    return z ^ (z >> 31);
}

// splitmix64 finalizer on a single word. Bijective on uint64, which the
// seed-derivation chain in experiments relies on.
inline std::uint64_t mix64(std::uint64_t z) noexcept {
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
    return z ^ (z >> 31);
}

class RngStream {
public:
    explicit RngStream(std::uint64_t seed) noexcept { reseed(seed); }

    // Raw-state constructor, used by the known-answer tests.
    explicit RngStream(const std::array<std::uint64_t, 4>& state) noexcept : s_(state) {}

    void reseed(std::uint64_t seed) noexcept {
        std::uint64_t sm = seed;
        for (auto& w : s_) w = splitmix64_next(sm);
        draws_ = 0;
    }

    // Raw xoshiro256** output.
    std::uint64_t next_u64() noexcept {
        const std::uint64_t result = rotl(s_[1] * 5, 7) * 9;
        const std::uint64_t t = s_[1] << 17;
        s_[2] ^= s_[0];
        s_[3] ^= s_[1];
        s_[1] ^= s_[2];
        s_[0] ^= s_[3];
        s_[2] ^= t;
        s_[3] = rotl(s_[3], 45);
        ++draws_;
        return result;
    }

    // Uniform real in [0,1) with 53-bit resolution. Exactly one raw draw.
    double next_u01() noexcept {
        return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
    }

    // Uniform integer in [0, bound). Bitmask rejection: one raw draw in the
    // common case, occasionally more; none at all when bound == 1.
    std::uint64_t next_below(std::uint64_t bound) {
        if (bound == 0) throw std::invalid_argument("RngStream::next_below: bound must be positive");
        if (bound == 1) return 0;
        const std::uint64_t mask = ~std::uint64_t{0} >> std::countl_zero(bound - 1);
        for (;;) {
            const std::uint64_t v = next_u64() & mask;
            if (v < bound) return v;
        }
    }

    // Number of raw 64-bit outputs produced since construction/reseed.
    std::uint64_t draws() const noexcept { return draws_; }

private:
    static std::uint64_t rotl(std::uint64_t x, int k) noexcept {
        return (x << k) | (x >> (64 - k));
    }

    std::array<std::uint64_t, 4> s_{};
    std::uint64_t draws_ = 0;
};

} // namespace pdpa
