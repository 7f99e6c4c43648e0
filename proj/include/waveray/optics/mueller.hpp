// waveray: a spectral wave-optics path tracer
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include "fresnel.hpp"
#include "stokes.hpp"

namespace waveray {

/// 4x4 real Mueller transfer matrix acting on Stokes vectors.
struct MuellerMatrix {
    Float m[4][4] = {};

    MuellerMatrix() = default;

    static MuellerMatrix zero() { return {}; }

    static MuellerMatrix identity() { return scale(1); }

    static MuellerMatrix scale(Float f) {
        MuellerMatrix r;
        for (int i = 0; i < 4; ++i) r.m[i][i] = f;
        return r;
    }

    /// Ideal depolarizer: passes f * s0, kills polarization.
    static MuellerMatrix depolarizer(Float f) {
        MuellerMatrix r;
        r.m[0][0] = f;
        return r;
    }

    /// Polarimetric interaction assembled from s/p amplitude coefficients,
    /// expressed in the plane-of-incidence frame (x = s axis, y = p axis).
    static MuellerMatrix from_amplitudes(complex_t a_s, complex_t a_p) {
        Float rs2 = std::norm(a_s), rp2 = std::norm(a_p);
        complex_t cross = a_s * std::conj(a_p);
        MuellerMatrix r;
        r.m[0][0] = r.m[1][1] = 0.5 * (rs2 + rp2);
        r.m[0][1] = r.m[1][0] = 0.5 * (rs2 - rp2);
        r.m[2][2] = r.m[3][3] = cross.real();
        r.m[2][3] = cross.imag();
        r.m[3][2] = -cross.imag();
        return r;
    }

    /// Reference-frame rotation by phi about the propagation axis.
    static MuellerMatrix rotator(Float phi) {
        Float c = std::cos(2 * phi), s = std::sin(2 * phi);
        MuellerMatrix r = identity();
        r.m[1][1] = c;  r.m[1][2] = s;
        r.m[2][1] = -s; r.m[2][2] = c;
        return r;
    }

    StokesVector operator*(const StokesVector &v) const {
        Float in[4] = {v.s0, v.s1, v.s2, v.s3};
        Float out[4] = {};
        for (int i = 0; i < 4; ++i)
            for (int j = 0; j < 4; ++j) out[i] += m[i][j] * in[j];
        return {out[0], out[1], out[2], out[3]};
    }

    MuellerMatrix operator*(const MuellerMatrix &o) const {
        MuellerMatrix r;
        for (int i = 0; i < 4; ++i)
            for (int j = 0; j < 4; ++j) {
                Float acc = 0;
                for (int k = 0; k < 4; ++k) acc += m[i][k] * o.m[k][j];
                r.m[i][j] = acc;
            }
        return r;
    }

    MuellerMatrix operator*(Float f) const {
        MuellerMatrix r;
        for (int i = 0; i < 4; ++i)
            for (int j = 0; j < 4; ++j) r.m[i][j] = m[i][j] * f;
        return r;
    }

    MuellerMatrix operator+(const MuellerMatrix &o) const {
        MuellerMatrix r;
        for (int i = 0; i < 4; ++i)
            for (int j = 0; j < 4; ++j) r.m[i][j] = m[i][j] + o.m[i][j];
        return r;
    }

    MuellerMatrix &operator+=(const MuellerMatrix &o) {
        for (int i = 0; i < 4; ++i)
            for (int j = 0; j < 4; ++j) m[i][j] += o.m[i][j];
        return *this;
    }

    Float value() const { return m[0][0]; }
};

inline MuellerMatrix operator*(Float f, const MuellerMatrix &m) { return m * f; }

/// Result of fresnel_mueller: reflection/transmission operators in the s/p frame.
struct FresnelMueller {
    MuellerMatrix reflect;
    MuellerMatrix transmit;       // amplitude-level; apply power factor for energy
    complex_t cos_t;
    Float transmit_power_factor;  // (eta_t Re cos_t) / (eta_i cos_i), 0 under TIR
    bool tir = false;
};

inline FresnelMueller fresnel_mueller(Float cos_i, Float eta_i, complex_t eta_t) {
    FresnelAmplitudes f = fresnel_amplitudes(cos_i, eta_i, eta_t);
    FresnelMueller out;
    out.reflect = MuellerMatrix::from_amplitudes(f.r_s, f.r_p);
    out.cos_t = f.cos_t;
    out.tir = f.tir;
    if (f.tir) {
        out.transmit = MuellerMatrix::zero();
        out.transmit_power_factor = 0;
    } else {
        out.transmit = MuellerMatrix::from_amplitudes(f.t_s, f.t_p);
        out.transmit_power_factor =
            cos_i > 0 ? (eta_t.real() * f.cos_t.real()) / (eta_i * cos_i) : 0;
    }
    return out;
}

} // namespace waveray
