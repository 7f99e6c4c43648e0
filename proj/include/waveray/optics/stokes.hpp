// waveray: a spectral wave-optics path tracer
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include "../core/math.hpp"

namespace waveray {

/// Stokes parameters vector carrying units of spectral radiance.
/// s1 > 0 means linear polarization along the local frame's x axis.
struct StokesVector {
    Float s0 = 0, s1 = 0, s2 = 0, s3 = 0;

    StokesVector() = default;
    StokesVector(Float s0, Float s1, Float s2, Float s3) : s0(s0), s1(s1), s2(s2), s3(s3) {}

    static StokesVector unpolarized(Float radiance) { return {radiance, 0, 0, 0}; }

    StokesVector operator+(const StokesVector &o) const {
        return {s0 + o.s0, s1 + o.s1, s2 + o.s2, s3 + o.s3};
    }
    StokesVector &operator+=(const StokesVector &o) {
        s0 += o.s0; s1 += o.s1; s2 += o.s2; s3 += o.s3;
        return *this;
    }
    StokesVector operator*(Float f) const { return {s0 * f, s1 * f, s2 * f, s3 * f}; }

    Float polarized2() const { return s1 * s1 + s2 * s2 + s3 * s3; }

    Float degree_of_polarization() const {
        return s0 > 0 ? std::sqrt(polarized2()) / s0 : 0;
    }

    /// Physical realizability: non-negative power, DOP <= 1.
    bool valid(Float tol = 1e-9) const {
        if (!(s0 >= -tol * std::abs(s0))) return false;
        return polarized2() <= sqr(s0) * (1 + tol) + tol;
    }
};

inline StokesVector operator*(Float f, const StokesVector &s) { return s * f; }

} // namespace waveray
