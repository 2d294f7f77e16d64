#pragma once

#include <cstdint>
#include <limits>
#include <random>
#include <stdexcept>

namespace kld {

namespace detail {

// splitmix64 finalizer (Steele/Lea/Vigna); spreads (seed, stream) pairs
// over the mt19937_64 seed space.
inline std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9E3779B97F4A7C15ULL;
    x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
    x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
    return x ^ (x >> 31);
}

}  // namespace detail

/// Deterministic random source. A (seed, stream) pair yields the same draw
/// sequence on every platform: the engine is the standard-pinned
/// mt19937_64, seeded with splitmix64(seed + stream * golden_gamma), and
/// doubles are built from the top 53 bits explicitly (no
/// std::uniform_real_distribution, whose output is implementation-defined).
class SeededRng {
public:
    explicit SeededRng(std::uint64_t seed, std::uint64_t stream = 0)
        : seed_(seed), stream_(stream),
          engine_(detail::splitmix64(seed + stream * 0x9E3779B97F4A7C15ULL)) {}

    std::uint64_t seed() const { return seed_; }
    std::uint64_t stream_id() const { return stream_; }

    /// Fresh generator on another stream of the same base seed.
    SeededRng stream(std::uint64_t stream_id) const { return SeededRng(seed_, stream_id); }

    std::uint64_t next_u64() { return engine_(); }

    /// Uniform double in [0, 1), 53 random bits.
    double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

    /// Uniform double in the open interval (0, 1).
    double uniform_open() {
        double u = uniform();
        while (u == 0.0) u = uniform();
        return u;
    }

    /// Unbiased uniform index in [0, n); rejection sampling, no modulo bias.
    std::size_t uniform_index(std::size_t n) {
        if (n == 0) throw std::invalid_argument("uniform_index: n must be positive");
        const std::uint64_t nn = static_cast<std::uint64_t>(n);
        const std::uint64_t rem = (std::numeric_limits<std::uint64_t>::max() % nn + 1) % nn;
        std::uint64_t x = engine_();
        if (rem != 0) {
            const std::uint64_t bound = 0 - rem;  // 2^64 - rem
            while (x >= bound) x = engine_();
        }
        return static_cast<std::size_t>(x % nn);
    }

private:
    std::uint64_t seed_;
    std::uint64_t stream_;
    std::mt19937_64 engine_;
};

}  // namespace kld
