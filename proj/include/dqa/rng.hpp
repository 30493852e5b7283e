#pragma once

#include <cmath>
#include <cstdint>

namespace dqa {

struct SplitMix64 {
    std::uint64_t state;
    explicit SplitMix64(std::uint64_t seed) : state(seed) {}
    std::uint64_t next() {
        std::uint64_t z = (state += 0x9e3779b97f4a7c15ULL);
        z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
        z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
        return z ^ (z >> 31);
    }
};

// xoshiro256++, seeded through SplitMix64. Deterministic across platforms.
struct Xoshiro256pp {
    std::uint64_t s[4];

    explicit Xoshiro256pp(std::uint64_t seed = 1) {
        SplitMix64 sm(seed);
        for (auto& w : s) w = sm.next();
    }

    static std::uint64_t rotl(std::uint64_t x, int k) { return (x << k) | (x >> (64 - k)); }

    std::uint64_t next() {
        const std::uint64_t result = rotl(s[0] + s[3], 23) + s[0];
        const std::uint64_t t = s[1] << 17;
        s[2] ^= s[0];
        s[3] ^= s[1];
        s[1] ^= s[2];
        s[0] ^= s[3];
        s[2] ^= t;
        s[3] = rotl(s[3], 45);
        return result;
    }

    // uniform in [0, 1) with 53 random bits
    double uniform01() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }

    // strictly positive uniform, safe under log()
    double uniform01_pos() {
        double u;
        do {
            u = uniform01();
        } while (u <= 0.0);
        return u;
    }

    double exponential(double rate) { return -std::log(1.0 - uniform01()) / rate; }
};

// Independent sub-stream derivation: mixing the base seed with a stream tag
// keeps draws on one stream unchanged when another stream is consumed more.
inline Xoshiro256pp stream_rng(std::uint64_t seed, std::uint64_t stream) {
    SplitMix64 sm(seed ^ (0x9e3779b97f4a7c15ULL * (stream + 1)));
    return Xoshiro256pp(sm.next());
}

// Three streams used by the event simulators: buyer arrival times, item
// arrival times, buyer values. Common random numbers across policies.
struct RngStreams {
    Xoshiro256pp buyer_time;
    Xoshiro256pp item_time;
    Xoshiro256pp value;
    explicit RngStreams(std::uint64_t seed)
        : buyer_time(stream_rng(seed, 0)), item_time(stream_rng(seed, 1)), value(stream_rng(seed, 2)) {}
};

}  // namespace dqa
