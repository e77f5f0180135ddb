#pragma once

#include <cstdint>

namespace netsirs {

// Counter-based RNG. Every draw is a pure hash of (seed, stream, step, slot),
// so replica streams are independent of execution order and a given draw
// position always yields the same value. This is what makes seeded reruns
// byte-identical and common-random-number coupling experiments well-defined.

namespace detail {

inline std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

} // namespace detail

/// Hash of a four-word counter into a uniform 64-bit word.
inline std::uint64_t counter_hash(std::uint64_t seed, std::uint64_t stream,
                                  std::uint64_t step, std::uint64_t slot) {
    std::uint64_t h = detail::splitmix64(seed ^ 0x8ba57e7e41c6e2f1ULL);
    h = detail::splitmix64(h ^ stream);
    h = detail::splitmix64(h ^ step);
    h = detail::splitmix64(h ^ slot);
    return h;
}

/// Uniform double in [0, 1) from a four-word counter.
inline double counter_uniform(std::uint64_t seed, std::uint64_t stream,
                              std::uint64_t step, std::uint64_t slot) {
    return static_cast<double>(counter_hash(seed, stream, step, slot) >> 11) *
           0x1.0p-53;
}

/// Sequential generator over the same hash, for code that wants a stream
/// (graph generation, start-point sampling) rather than keyed draws.
class SplitMix64 {
public:
    explicit SplitMix64(std::uint64_t seed) : state_(seed) {}

    std::uint64_t next_u64() { return detail::splitmix64(state_++); }

    double next_double() {
        return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
    }

    /// Uniform integer in [0, bound) by rejection; bound must be positive.
    std::uint64_t next_below(std::uint64_t bound) {
        const std::uint64_t limit = bound * (UINT64_MAX / bound);
        for (;;) {
            std::uint64_t v = next_u64();
            if (v < limit) return v % bound;
        }
    }

private:
    std::uint64_t state_;
};

} // namespace netsirs
