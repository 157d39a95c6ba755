#pragma once

#include <cstdint>
#include <initializer_list>
#include <random>

namespace sinai {

using Seed = std::uint64_t;

constexpr std::uint64_t splitmix64(std::uint64_t x) noexcept {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

// Order-sensitive mix of a seed with a list of tags. Pure function, so every
// derived value depends only on (seed, tags) and never on call order.
constexpr std::uint64_t derive_seed(Seed seed, std::initializer_list<std::uint64_t> tags) noexcept {
    std::uint64_t h = splitmix64(seed ^ 0x5851f42d4c957f2dULL);
    for (auto t : tags) {
        h = splitmix64(h ^ splitmix64(t + 0x632be59bd9b4e019ULL));
    }
    return h;
}

// Uniform double in [0, 1) from the top 53 bits.
constexpr double to_unit(std::uint64_t bits) noexcept {
    return static_cast<double>(bits >> 11) * 0x1.0p-53;
}

// Independent random stream. mt19937_64 output is fixed by the standard, and
// only raw 64-bit draws are used, so sequences are identical across platforms.
class Stream {
public:
    explicit Stream(Seed seed) : engine_(splitmix64(seed)) {}

    static Stream derive(Seed master, std::initializer_list<std::uint64_t> tags) {
        return Stream(derive_seed(master, tags));
    }

    std::uint64_t next() { return engine_(); }
    double uniform() { return to_unit(engine_()); }

    // Integer in [0, bound); the tiny modulo bias is irrelevant for resampling.
    std::uint64_t below(std::uint64_t bound) { return engine_() % bound; }

private:
    std::mt19937_64 engine_;
};

}  // namespace sinai
