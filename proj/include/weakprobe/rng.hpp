#pragma once

#include <cstdint>
#include <random>

namespace weakprobe {

// Deterministic uniform stream. Per-trajectory streams are derived from
// (master_seed, stream_index) so ensembles are reproducible and
// independent of worker count or execution order.
class Rng {
public:
    explicit Rng(std::uint64_t seed) : gen_(seed) {}

    static Rng stream(std::uint64_t master_seed, std::uint64_t index) {
        std::seed_seq seq{static_cast<std::uint32_t>(master_seed),
                          static_cast<std::uint32_t>(master_seed >> 32),
                          static_cast<std::uint32_t>(index),
                          static_cast<std::uint32_t>(index >> 32)};
        Rng r(0);
        r.gen_.seed(seq);
        return r;
    }

    // Uniform in [0, 1) with 53 bits, bit-identical across platforms.
    double uniform() { return (gen_() >> 11) * 0x1.0p-53; }

    std::uint64_t raw() { return gen_(); }

private:
    std::mt19937_64 gen_;
};

} // namespace weakprobe
