#pragma once

#include <array>
#include <cmath>
#include <cstdint>

namespace adacp {

// Deterministic seeded stream: xoshiro256++ state derived from a 64-bit key
// via splitmix64. Streams are split by hashing labels into the *key*, not the
// evolving state, so a substream does not depend on how much of the parent
// was consumed. All samplers are implemented here (not std::<random>
// distributions) so that results are bit-identical across toolchains and
// thread counts.
class RngStream {
public:
    explicit RngStream(uint64_t seed) : key_(seed) { init_state(); }

    // Derive an independent substream, e.g. split(cell, replicate).
    RngStream split(uint64_t a, uint64_t b = 0, uint64_t c = 0) const {
        uint64_t k = key_;
        k = mix(k ^ mix(a + 0x9e3779b97f4a7c15ULL));
        k = mix(k ^ mix(b + 0x7f4a7c159e3779b9ULL));
        k = mix(k ^ mix(c + 0x2545f4914f6cdd1dULL));
        return RngStream(k);
    }

    uint64_t next_u64() {
        const uint64_t result = rotl(s_[0] + s_[3], 23) + s_[0];
        const uint64_t t = s_[1] << 17;
        s_[2] ^= s_[0];
        s_[3] ^= s_[1];
        s_[1] ^= s_[2];
        s_[0] ^= s_[3];
        s_[2] ^= t;
        s_[3] = rotl(s_[3], 45);
        return result;
    }

    // Uniform on [0, 1): 53 random bits.
    double uniform01() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform01(); }

    // Exponential with the given rate; strictly positive.
    double exponential(double rate) { return -std::log1p(-uniform01()) / rate; }

    // Standard normal via Box-Muller; the second value of each pair is cached.
    double normal() {
        if (have_spare_) {
            have_spare_ = false;
            return spare_;
        }
        double u1 = uniform01();
        while (u1 <= 0.0) u1 = uniform01();
        const double u2 = uniform01();
        const double r = std::sqrt(-2.0 * std::log(u1));
        const double theta = 6.283185307179586476925286766559 * u2;
        spare_ = r * std::sin(theta);
        have_spare_ = true;
        return r * std::cos(theta);
    }

    uint64_t key() const { return key_; }

private:
    static uint64_t rotl(uint64_t x, int k) { return (x << k) | (x >> (64 - k)); }

    static uint64_t mix(uint64_t z) {  // splitmix64 finalizer
        z += 0x9e3779b97f4a7c15ULL;
        z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
        z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
        return z ^ (z >> 31);
    }

    void init_state() {
        uint64_t z = key_;
        for (auto& s : s_) {
            z = mix(z);
            s = z;
        }
        // xoshiro must not start from the all-zero state
        if (s_[0] == 0 && s_[1] == 0 && s_[2] == 0 && s_[3] == 0) s_[0] = 1;
    }

    uint64_t key_;
    std::array<uint64_t, 4> s_{};
    bool have_spare_ = false;
    double spare_ = 0.0;
};

}  // namespace adacp
