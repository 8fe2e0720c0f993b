#pragma once

// All randomness flows from one experiment seed through named substreams, so
// stages can be cached or re-run independently without perturbing each other.
// The generator and the int/real mappings are self-contained; output is
// identical on every platform and standard library.

#include <cstdint>
#include <string_view>

namespace trustsiot {

// splitmix64; passes through all 2^64 states, good enough for sampling and
// parameter init at this scale.
class Rng {
public:
    explicit Rng(std::uint64_t seed) : state_(seed) {}

    std::uint64_t next() {
        std::uint64_t z = (state_ += 0x9e3779b97f4a7c15ULL);
        z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
        z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
        return z ^ (z >> 31);
    }

    // Uniform in [0, bound), bound > 0. Rejection-free multiply-shift keeps a
    // negligible bias for bounds far below 2^64.
    std::uint64_t below(std::uint64_t bound) {
        return static_cast<std::uint64_t>(
            (static_cast<unsigned __int128>(next()) * bound) >> 64);
    }

    // Uniform in [0, 1) with 53 bits of precision.
    double real() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }

    // Uniform in [lo, hi).
    double real(double lo, double hi) { return lo + (hi - lo) * real(); }

    bool coin() { return (next() & 1) != 0; }

private:
    std::uint64_t state_;
};

// Derives a substream seed by folding the stream name into the base seed.
std::uint64_t substream_seed(std::uint64_t base_seed, std::string_view name);

inline Rng substream(std::uint64_t base_seed, std::string_view name) {
    return Rng(substream_seed(base_seed, name));
}

}  // namespace trustsiot
