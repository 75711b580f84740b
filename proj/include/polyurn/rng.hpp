#pragma once

#include <cmath>
#include <cstdint>
#include <random>

namespace polyurn {

/// Seeded random stream for one replica.
///
/// Contract: identical (seed, stream_id) produce the identical draw sequence,
/// bit for bit, on every platform (mt19937_64 and the [0,1) mapping below are
/// fully specified; no std::*_distribution is used anywhere). Distinct
/// stream_ids hash to unrelated engine seeds, giving statistically
/// independent replica streams from a single base seed.
class RngStream {
public:
    RngStream(std::uint64_t seed, std::uint64_t stream_id)
        : seed_(seed), stream_id_(stream_id), engine_(derive(seed, stream_id)) {}

    /// Uniform double in [0, 1) with 53 random bits.
    double u01() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

    bool bernoulli(double p) { return u01() < p; }

    /// Standard (rate 1) exponential via inversion.
    double exponential() { return -std::log(1.0 - u01()); }

    std::uint64_t raw() { return engine_(); }

    std::uint64_t seed() const { return seed_; }
    std::uint64_t stream_id() const { return stream_id_; }

private:
    static std::uint64_t mix(std::uint64_t z) {
        // splitmix64 finalizer
        z += 0x9E3779B97F4A7C15ull;
        z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
        z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
        return z ^ (z >> 31);
    }

    static std::uint64_t derive(std::uint64_t seed, std::uint64_t stream_id) {
        return mix(mix(seed) + 0x9E3779B97F4A7C15ull * (stream_id + 1));
    }

    std::uint64_t seed_;
    std::uint64_t stream_id_;
    std::mt19937_64 engine_;
};

}  // namespace polyurn
