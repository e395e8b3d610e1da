// Deterministic, splittable random number generation for the simulation
// harness. Everything downstream of a 64-bit master seed is reproducible.
#pragma once

#include <cmath>
#include <cstdint>
#include <limits>

namespace streambandit {

inline constexpr std::uint64_t kGoldenGamma = 0x9E3779B97F4A7C15ULL;

// SplitMix64 output finalizer (Steele, Lea & Flood; Vigna's constants).
constexpr std::uint64_t mix64(std::uint64_t z) {
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
}

// SplitMix64: additive 64-bit state, one finalizer round per output.
// Output i from seed s equals mix64(s + (i+1)*kGoldenGamma), so a stream
// doubles as a counter-based generator with O(1) random access via at().
class SplitMix64 {
public:
    using result_type = std::uint64_t;

    explicit constexpr SplitMix64(std::uint64_t seed) : state_(seed) {}

    constexpr result_type operator()() { return mix64(state_ += kGoldenGamma); }

    static constexpr result_type at(std::uint64_t seed, std::uint64_t i) {
        return mix64(seed + (i + 1) * kGoldenGamma);
    }

    static constexpr result_type min() { return 0; }
    static constexpr result_type max() { return std::numeric_limits<std::uint64_t>::max(); }

private:
    std::uint64_t state_;
};

// Sub-stream seed derivation: fold (a, b) into the master seed through two
// finalizer rounds with distinct odd multipliers. Used to give every
// (episode, purpose) pair an independent generator.
constexpr std::uint64_t derive_seed(std::uint64_t master, std::uint64_t a, std::uint64_t b = 0) {
    std::uint64_t h = mix64(master + (a + 1) * kGoldenGamma);
    h = mix64(h ^ ((b + 1) * 0xD1B54A32D192ED03ULL));
    return h;
}

// Purpose tags for derive_seed(master, episode, tag). Latent means and
// payouts use separate sub-streams so strategies with different pull counts
// still face identical mean sequences.
inline constexpr std::uint64_t kMeanStream = 1;
inline constexpr std::uint64_t kPayoutStream = 2;

// Uniform doubles from the high bits. unit_open uses 52 bits so the +0.5
// midpoint stays exactly representable at the top of the range.
constexpr double unit_halfopen(std::uint64_t bits) {  // [0, 1)
    return static_cast<double>(bits >> 11) * 0x1.0p-53;
}
constexpr double unit_open(std::uint64_t bits) {  // (0, 1)
    return (static_cast<double>(bits >> 12) + 0.5) * 0x1.0p-52;
}

inline double next_unit_halfopen(SplitMix64& g) { return unit_halfopen(g()); }
inline double next_unit_open(SplitMix64& g) { return unit_open(g()); }

// Exact Binomial(n, p) sample via geometric gaps between successes.
// Cost is O(successes + 1) uniform draws, which keeps batched episode
// tails cheap when p is small. For p > 1/2 the complement is sampled.
inline std::uint64_t sample_binomial(SplitMix64& g, std::uint64_t n, double p) {
    if (n == 0 || p <= 0.0) return 0;
    if (p >= 1.0) return n;
    if (p > 0.5) return n - sample_binomial(g, n, 1.0 - p);
    const double log_q = std::log1p(-p);  // < 0
    std::uint64_t successes = 0;
    std::uint64_t pos = 0;  // trials consumed so far
    while (true) {
        const double gap = std::floor(std::log(next_unit_open(g)) / log_q);
        if (!(gap < static_cast<double>(n - pos))) break;  // next success lands past trial n
        pos += static_cast<std::uint64_t>(gap) + 1;
        ++successes;
        if (pos >= n) break;
    }
    return successes;
}

}  // namespace streambandit
