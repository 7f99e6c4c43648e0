// waveray: a spectral wave-optics path tracer
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include "../core/math.hpp"

namespace waveray {

/// Complex s/p amplitude coefficients at a planar interface.
struct FresnelAmplitudes {
    complex_t r_s, r_p;   // reflection
    complex_t t_s, t_p;   // transmission
    complex_t cos_t;      // transmitted-angle cosine (complex for absorbing/TIR)
    bool tir = false;     // total internal reflection (lossless media only)

    Float reflectance_s() const { return std::norm(r_s); }
    Float reflectance_p() const { return std::norm(r_p); }
    Float reflectance_unpolarized() const { return 0.5 * (std::norm(r_s) + std::norm(r_p)); }
};

/// Fresnel coefficients for incidence from a lossless medium eta_i into eta_t.
/// cos_i in [0, 1]. Handles absorbing media and TIR via the complex cos_t branch.
inline FresnelAmplitudes fresnel_amplitudes(Float cos_i, Float eta_i, complex_t eta_t) {
    assert(cos_i >= 0 && cos_i <= 1 + 1e-12 && eta_i > 0);
    cos_i = clamp(cos_i, 0, 1);

    complex_t eta_rel = eta_t / eta_i;
    Float sin2_i = 1 - cos_i * cos_i;
    complex_t sin2_t = sin2_i / (eta_rel * eta_rel);
    complex_t cos_t = std::sqrt(complex_t(1, 0) - sin2_t);
    // Decaying-wave branch: Im(eta_t * cos_t) >= 0.
    if ((eta_t * cos_t).imag() < 0) cos_t = -cos_t;

    FresnelAmplitudes f;
    f.cos_t = cos_t;
    complex_t ei_ci = eta_i * cos_i, et_ct = eta_t * cos_t;
    complex_t et_ci = eta_t * cos_i, ei_ct = eta_i * cos_t;
    f.r_s = (ei_ci - et_ct) / (ei_ci + et_ct);
    f.r_p = (et_ci - ei_ct) / (et_ci + ei_ct);
    f.t_s = 2.0 * ei_ci / (ei_ci + et_ct);
    f.t_p = 2.0 * ei_ci / (et_ci + ei_ct);
    f.tir = eta_t.imag() == 0 && sin2_t.real() > 1;
    return f;
}

/// Power transmittance factors (lossless dielectrics): T = factor * |t|^2.
inline Float fresnel_transmit_factor(Float cos_i, Float eta_i, Float eta_t, Float cos_t) {
    return cos_i > 0 ? (eta_t * cos_t) / (eta_i * cos_i) : 0;
}

} // namespace waveray
