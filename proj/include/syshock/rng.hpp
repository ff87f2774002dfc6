#pragma once

#include <cstdint>

namespace syshock {

/// Counter-addressed random stream: every (seed, key) pair names an
/// independent SplitMix64 sequence, so work items can be drawn in any order
/// or on any thread with identical results.
class RandomStream {
public:
    RandomStream(std::uint64_t seed, std::uint64_t key)
        : state_(mix(mix(seed) ^ (key * 0xD1342543DE82EF95ULL + 0x2545F4914F6CDD1DULL))) {}

    std::uint64_t next_u64() {
        state_ += 0x9E3779B97F4A7C15ULL;
        return mix(state_);
    }

    /// Uniform on the open interval (0,1).
    double uniform() {
        for (;;) {
            const double u = static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
            if (u > 0.0) return u;
        }
    }

private:
    static std::uint64_t mix(std::uint64_t z) {
        z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
        z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
        return z ^ (z >> 31);
    }

    std::uint64_t state_;
};

}  // namespace syshock
