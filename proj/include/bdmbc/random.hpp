#pragma once

// Deterministic random streams.
//
// Every random quantity in the library is drawn from xoshiro256** seeded
// through SplitMix64. A stream is identified by (seed, stream id):
//
//   key   = splitmix64_mix(seed ^ splitmix64_mix(stream + 0x9E3779B97F4A7C15))
//   state = four successive SplitMix64 outputs starting from `key`
//
// Doubles in [0, 1) take the top 53 bits of a 64-bit draw. Bounded integers
// use Lemire's multiply-and-reject method. Normals use the Box-Muller
// transform with u1 taken from (0, 1]; both outputs of a pair are used in
// order (cosine branch first). These choices are part of the external
// contract: reimplementations that follow them reproduce generator output.

#include <array>
#include <cmath>
#include <cstdint>
#include <numbers>

namespace bdmbc {

constexpr std::uint64_t splitmix64_mix(std::uint64_t z) noexcept {
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
}

class SplitMix64 {
public:
    explicit constexpr SplitMix64(std::uint64_t state) noexcept : state_(state) {}

    constexpr std::uint64_t next() noexcept {
        state_ += 0x9E3779B97F4A7C15ULL;
        return splitmix64_mix(state_);
    }

private:
    std::uint64_t state_;
};

/// Stream-derivation key for (seed, stream).
constexpr std::uint64_t stream_key(std::uint64_t seed, std::uint64_t stream) noexcept {
    return splitmix64_mix(seed ^ splitmix64_mix(stream + 0x9E3779B97F4A7C15ULL));
}

class Rng {
public:
    using result_type = std::uint64_t;

    explicit Rng(std::uint64_t seed, std::uint64_t stream = 0) noexcept {
        SplitMix64 sm(stream_key(seed, stream));
        for (auto& word : s_) word = sm.next();
    }

    static constexpr result_type min() noexcept { return 0; }
    static constexpr result_type max() noexcept { return ~result_type{0}; }

    result_type operator()() noexcept { return next(); }

    std::uint64_t next() noexcept {
        const std::uint64_t result = rotl(s_[1] * 5, 7) * 9;
        const std::uint64_t t = s_[1] << 17;
        s_[2] ^= s_[0];
        s_[3] ^= s_[1];
        s_[1] ^= s_[2];
        s_[0] ^= s_[3];
        s_[2] ^= t;
        s_[3] = rotl(s_[3], 45);
        return result;
    }

    /// Uniform in [0, 1).
    double uniform() noexcept { return static_cast<double>(next() >> 11) * 0x1.0p-53; }

    /// Uniform integer in [0, bound); bound must be positive.
    std::uint64_t below(std::uint64_t bound) noexcept {
        __uint128_t m = static_cast<__uint128_t>(next()) * bound;
        auto low = static_cast<std::uint64_t>(m);
        if (low < bound) {
            const std::uint64_t threshold = (0 - bound) % bound;
            while (low < threshold) {
                m = static_cast<__uint128_t>(next()) * bound;
                low = static_cast<std::uint64_t>(m);
            }
        }
        return static_cast<std::uint64_t>(m >> 64);
    }

    /// Standard normal via Box-Muller.
    double normal() noexcept {
        if (has_spare_) {
            has_spare_ = false;
            return spare_;
        }
        const double u1 = 1.0 - uniform();
        const double u2 = uniform();
        const double radius = std::sqrt(-2.0 * std::log(u1));
        const double angle = 2.0 * std::numbers::pi * u2;
        spare_ = radius * std::sin(angle);
        has_spare_ = true;
        return radius * std::cos(angle);
    }

private:
    static constexpr std::uint64_t rotl(std::uint64_t x, int k) noexcept {
        return (x << k) | (x >> (64 - k));
    }

    std::array<std::uint64_t, 4> s_{};
    double spare_ = 0.0;
    bool has_spare_ = false;
};

} // namespace bdmbc
