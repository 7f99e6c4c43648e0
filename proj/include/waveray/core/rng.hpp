// waveray: a spectral wave-optics path tracer
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>

#include "math.hpp"

namespace waveray {

// PCG32 (O'Neill). Each (pixel, sample) pair owns an independent stream so
// accumulation order is fixed no matter how work is divided among threads.
class Pcg32 {
public:
    Pcg32() { seed(0x853c49e6748fea9bULL, 0xda3e39cb94b95bdbULL); }
    Pcg32(uint64_t initstate, uint64_t initseq = 1) { seed(initstate, initseq); }

    void seed(uint64_t initstate, uint64_t initseq) {
        m_state = 0u;
        m_inc = (initseq << 1u) | 1u;
        next_u32();
        m_state += initstate;
        next_u32();
    }

    uint32_t next_u32() {
        uint64_t oldstate = m_state;
        m_state = oldstate * 6364136223846793005ULL + m_inc;
        uint32_t xorshifted = (uint32_t)(((oldstate >> 18u) ^ oldstate) >> 27u);
        uint32_t rot = (uint32_t)(oldstate >> 59u);
        return (xorshifted >> rot) | (xorshifted << ((~rot + 1u) & 31));
    }

    uint64_t next_u64() { return ((uint64_t)next_u32() << 32) | next_u32(); }

    /// Uniform double in [0, 1)
    Float next_float() { return (next_u64() >> 11) * 0x1p-53; }

    Vec2 next_2d() {
        Float a = next_float();
        Float b = next_float();
        return {a, b};
    }

private:
    uint64_t m_state, m_inc;
};

// SplitMix64 finalizer; used to whiten (seed, pixel, sample) tuples.
inline uint64_t hash_u64(uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

inline uint64_t hash_combine(uint64_t a, uint64_t b) {
    return hash_u64(a ^ (b + 0x9e3779b97f4a7c15ULL + (a << 6) + (a >> 2)));
}

inline Pcg32 make_stream(uint64_t seed, uint64_t pixel, uint64_t sample) {
    uint64_t h = hash_combine(hash_combine(seed, pixel), sample);
    return Pcg32(h, hash_u64(h));
}

} // namespace waveray
