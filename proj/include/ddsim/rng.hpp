#pragma once

#include <cstdint>
#include <initializer_list>

// Deterministic keyed randomness. Every stochastic choice in a scenario is
// derived from the scenario seed through these mixers, so a (config, seed)
// pair always reproduces the same run bit for bit, independent of platform.

namespace ddsim {

constexpr std::uint64_t mix64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ull;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ull;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebull;
    return x ^ (x >> 31);
}

// Folds a seed and a list of domain-separating words into one 64-bit value.
constexpr std::uint64_t derive(std::uint64_t seed, std::initializer_list<std::uint64_t> words) {
    std::uint64_t h = mix64(seed);
    for (std::uint64_t w : words)
        h = mix64(h ^ w);
    return h;
}

// Small counter-based stream for shuffles and draws at scenario build time.
class SplitMix64 {
  public:
    explicit SplitMix64(std::uint64_t seed) : state_(seed) {}

    std::uint64_t next() { return mix64(state_++); }

    // Uniform in [0, bound). Bound must be nonzero. Rejection keeps the
    // distribution exact so draws are identical on every platform.
    std::uint64_t next_below(std::uint64_t bound) {
        const std::uint64_t limit = bound * (~std::uint64_t{0} / bound);
        std::uint64_t v = next();
        while (v >= limit)
            v = next();
        return v % bound;
    }

  private:
    std::uint64_t state_;
};

} // namespace ddsim
