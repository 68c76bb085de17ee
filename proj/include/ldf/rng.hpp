#pragma once

#include <cstdint>
#include <initializer_list>
#include <random>
#include <vector>

namespace ldf {

/// Named substreams. Every random draw in the library flows from one master
/// seed through one of these, so policies can be compared on coupled paths.
enum class Stream : std::uint64_t {
    workloads = 1,
    tie_break = 2,
    monte_carlo = 3,
    sampling = 4,
    generator = 5,
    replication = 6,
};

/// SplitMix64 finalizer; used to derive child seeds.
constexpr std::uint64_t mix64(std::uint64_t z) noexcept {
    z += 0x9e3779b97f4a7c15ULL;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

/// Seed of the child stream reached from `seed` by following `path`.
constexpr std::uint64_t derive_seed(std::uint64_t seed, std::initializer_list<std::uint64_t> path) noexcept {
    std::uint64_t s = mix64(seed);
    for (auto p : path) s = mix64(s ^ mix64(p + 0x632be59bd9b4e019ULL));
    return s;
}

/// A seeded Mersenne Twister addressed by (master seed, path). Two streams
/// with the same address produce identical sequences regardless of which
/// thread creates them.
class RngStream {
public:
    using result_type = std::mt19937_64::result_type;

    explicit RngStream(std::uint64_t seed) : RngStream(seed, {}) {}

    RngStream(std::uint64_t seed, std::initializer_list<std::uint64_t> path) {
        const std::uint64_t s = derive_seed(seed, path);
        std::seed_seq seq{static_cast<std::uint32_t>(s), static_cast<std::uint32_t>(s >> 32),
                          static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32)};
        engine_.seed(seq);
    }

    RngStream(std::uint64_t seed, Stream stream, std::initializer_list<std::uint64_t> path = {})
        : RngStream(derive_seed(seed, {static_cast<std::uint64_t>(stream)}), path) {}

    static constexpr result_type min() { return std::mt19937_64::min(); }
    static constexpr result_type max() { return std::mt19937_64::max(); }
    result_type operator()() { return engine_(); }

    /// Uniform on [0, 1).
    double uniform() { return std::generate_canonical<double, 53>(engine_); }

private:
    std::mt19937_64 engine_;
};

}  // namespace ldf
