#pragma once

#include <cstdint>

namespace wpc {

// splitmix64. State advances by the golden-ratio increment; output is the
// Stafford mix13 finalizer. Constants are part of the trace format contract:
// identical seeds must reproduce identical traces on every platform.
class SplitMix64 {
public:
    explicit constexpr SplitMix64(std::uint64_t seed) : state_(seed) {}

    constexpr std::uint64_t next() {
        state_ += 0x9E3779B97F4A7C15ull;
        std::uint64_t z = state_;
        z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
        z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
        return z ^ (z >> 31);
    }

    // Uniform draw from [0, bound) by rejection; no modulo bias. bound >= 1.
    constexpr std::uint64_t below(std::uint64_t bound) {
        // 2^64 mod bound; draws under this threshold would be biased.
        const std::uint64_t threshold = (0 - bound) % bound;
        for (;;) {
            const std::uint64_t r = next();
            if (r >= threshold) return r % bound;
        }
    }

private:
    std::uint64_t state_;
};

// Stable derivation of per-task seeds from a base seed.
constexpr std::uint64_t derive_seed(std::uint64_t base, std::uint64_t index) {
    return SplitMix64(base ^ (0xA5A5A5A5A5A5A5A5ull + index)).next();
}

}  // namespace wpc
