#pragma once

#include <compare>
#include <cstdint>
#include <string>

#include "ddsim/rng.hpp"

namespace ddsim {

// 128-bit non-cryptographic digest. Collisions are negligible at fleet
// scale but not impossible; nothing security-critical hangs off equality.
struct Digest128 {
    std::uint64_t hi = 0;
    std::uint64_t lo = 0;

    friend auto operator<=>(const Digest128&, const Digest128&) = default;
};

std::string to_hex(const Digest128& d);

// Incremental two-lane mixer used to hash ordered byte and word streams.
class DigestBuilder {
  public:
    explicit DigestBuilder(std::uint64_t tag) {
        hi_ = mix64(tag ^ 0x9363eb5d1cab1eadull);
        lo_ = mix64(tag ^ 0x42f0e1eba9ea3693ull);
    }

    DigestBuilder& word(std::uint64_t w) {
        hi_ = mix64(hi_ ^ w);
        lo_ = mix64(lo_ + (w ^ 0xa5a5a5a5a5a5a5a5ull));
        return *this;
    }

    DigestBuilder& bytes(const unsigned char* p, std::size_t n) {
        word(n);
        std::uint64_t acc = 0;
        std::size_t k = 0;
        for (std::size_t i = 0; i < n; ++i) {
            acc |= std::uint64_t(p[i]) << (8 * k);
            if (++k == 8) {
                word(acc);
                acc = 0;
                k = 0;
            }
        }
        if (k != 0)
            word(acc);
        return *this;
    }

    Digest128 finish() const { return {mix64(hi_ ^ lo_), mix64(lo_ ^ (hi_ >> 1))}; }

  private:
    std::uint64_t hi_;
    std::uint64_t lo_;
};

} // namespace ddsim
