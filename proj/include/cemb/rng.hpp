#pragma once

#include <cstdint>
#include <string_view>

namespace cemb {

/// splitmix64: the state walks a Weyl sequence, the output is the mixed
/// state. Pure 64-bit integer arithmetic, so identical across platforms.
class SplitMix64 {
public:
    explicit SplitMix64(std::uint64_t seed) : state_(seed) {}

    std::uint64_t next() {
        std::uint64_t z = (state_ += 0x9e3779b97f4a7c15ULL);
        z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
        z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
        return z ^ (z >> 31);
    }

    /// Uniform double in [0, 1), 53 random bits.
    double next_double() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }

private:
    std::uint64_t state_;
};

constexpr std::uint64_t fnv1a64(std::string_view bytes) {
    std::uint64_t h = 14695981039346656037ULL;
    for (char c : bytes) {
        h ^= static_cast<unsigned char>(c);
        h *= 1099511628211ULL;
    }
    return h;
}

/// Decorrelates (seed, index) pairs into independent stream seeds, so
/// per-item RNG streams do not depend on iteration order.
inline std::uint64_t stream_seed(std::uint64_t seed, std::uint64_t index) {
    return SplitMix64(seed ^ (0x9e3779b97f4a7c15ULL * (index + 1))).next();
}

}  // namespace cemb
