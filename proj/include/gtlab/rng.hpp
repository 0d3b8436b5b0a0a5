// Counter-based random streams. Every stream is a pure function of
// (key, position), so trials can be replayed or run in parallel in any
// order without coordination.
#pragma once

#include <cstdint>

namespace gtlab {

/// splitmix64 finalizer; bijective on 64-bit words.
inline std::uint64_t mix64(std::uint64_t x) noexcept {
    x ^= x >> 30;
    x *= 0xBF58476D1CE4E5B9ULL;
    x ^= x >> 27;
    x *= 0x94D049BB133111EBULL;
    x ^= x >> 31;
    return x;
}

inline constexpr std::uint64_t kGolden = 0x9E3779B97F4A7C15ULL;

/// Keyed hash chain; distinct (seed, a, b) give effectively independent keys.
inline std::uint64_t derive_key(std::uint64_t seed, std::uint64_t a, std::uint64_t b) noexcept {
    std::uint64_t h = mix64(seed + kGolden);
    h = mix64(h ^ (a + kGolden));
    h = mix64(h ^ (b + kGolden));
    return h;
}

/// Stream of 64-bit words: output i = mix64(key + (i+1)*golden). Equivalent to
/// splitmix64 seeded at `key`; the counter makes the position explicit.
class CounterRng {
public:
    explicit CounterRng(std::uint64_t key) noexcept : key_(key) {}

    std::uint64_t next_u64() noexcept { return mix64(key_ + kGolden * ++counter_); }

    /// Uniform double in [0, 1) with 53 random bits.
    double next_double() noexcept {
        return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
    }

    /// True with probability p. Consumes exactly one draw regardless of p.
    bool bernoulli(double p) noexcept { return next_double() < p; }

    /// Unbiased uniform integer in [0, bound); bound >= 1.
    std::uint64_t below(std::uint64_t bound) noexcept {
        const std::uint64_t threshold = (0 - bound) % bound;
        for (;;) {
            const std::uint64_t r = next_u64();
            if (r >= threshold) return r % bound;
        }
    }

    std::uint64_t position() const noexcept { return counter_; }

    // UniformRandomBitGenerator.
    using result_type = std::uint64_t;
    static constexpr result_type min() { return 0; }
    static constexpr result_type max() { return ~std::uint64_t{0}; }
    result_type operator()() noexcept { return next_u64(); }

private:
    std::uint64_t key_;
    std::uint64_t counter_ = 0;
};

/// Which random choices a per-trial stream feeds. Keeping the roles on
/// separate streams makes design randomness and channel noise independently
/// replayable.
enum class StreamRole : std::uint64_t {
    DefectDraw = 1,
    Design = 2,
    Channel = 3,
};

inline CounterRng trial_stream(std::uint64_t seed, std::uint64_t trial, StreamRole role) noexcept {
    return CounterRng(derive_key(seed, trial, static_cast<std::uint64_t>(role)));
}

/// Per-point seed for sweeps: a deterministic function of (base seed, index).
inline std::uint64_t derive_sweep_seed(std::uint64_t base_seed, std::uint64_t axis_index) noexcept {
    return derive_key(base_seed, axis_index, 0x5157454550ULL);  // "SWEEP"
}

}  // namespace gtlab
