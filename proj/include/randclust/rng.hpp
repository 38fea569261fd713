#pragma once

#include <cmath>
#include <cstdint>

// Seedable counter-style random streams. Every randomized routine in the
// library derives one substream per independent unit of work (row, restart,
// replicate) via mix(), so output is identical at any thread count.

namespace randclust::rng {

inline constexpr std::uint64_t kGolden = 0x9e3779b97f4a7c15ull;

inline std::uint64_t splitmix64(std::uint64_t& state) {
    state += kGolden;
    std::uint64_t z = state;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
    return z ^ (z >> 31);
}

/// Derive a substream seed from a parent seed and an index/tag.
inline std::uint64_t mix(std::uint64_t seed, std::uint64_t tag) {
    std::uint64_t s = seed ^ (tag + kGolden + (seed << 6) + (seed >> 2));
    return splitmix64(s);
}

/// Sequential 64-bit stream (splitmix64 over an advancing state).
class Stream {
public:
    explicit Stream(std::uint64_t seed) : state_(seed) {}

    std::uint64_t next_u64() { return splitmix64(state_); }

    /// Uniform double in [0, 1), 53-bit resolution.
    double next_uniform() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

    /// Uniform integer in [0, bound). bound must be > 0.
    std::uint64_t next_below(std::uint64_t bound) { return next_u64() % bound; }

private:
    std::uint64_t state_;
};

/// Standard Gaussian draws via Box-Muller over a Stream, pairwise order:
/// each pair of uniforms (u1, u2) yields the cosine value then the sine value.
class GaussianStream {
public:
    explicit GaussianStream(std::uint64_t seed) : stream_(seed) {}

    double next() {
        if (have_spare_) {
            have_spare_ = false;
            return spare_;
        }
        // u1 in (0, 1] so log() stays finite.
        double u1 = static_cast<double>((stream_.next_u64() >> 11) + 1) * 0x1.0p-53;
        double u2 = stream_.next_uniform();
        double radius = std::sqrt(-2.0 * std::log(u1));
        double angle = 6.283185307179586476925286766559 * u2;
        spare_ = radius * std::sin(angle);
        have_spare_ = true;
        return radius * std::cos(angle);
    }

private:
    Stream stream_;
    bool have_spare_ = false;
    double spare_ = 0.0;
};

}  // namespace randclust::rng
