// waveray: a spectral wave-optics path tracer
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <vector>

#include "ior.hpp"

namespace waveray {

/// Ordered thin-film stack between ambient and substrate media.
/// Layers listed from the ambient side; thickness in meters.
struct MultilayerStack {
    struct Layer {
        Float thickness;
        RefractiveIndex ior;
    };
    std::vector<Layer> layers;
    RefractiveIndex ambient = RefractiveIndex::constant(1);
    RefractiveIndex substrate = RefractiveIndex::constant(1.5);
};

/// Characteristic-matrix reflection amplitudes (r_s, r_p) of the stack.
/// cos_i in (0, 1]; lambda in nm; thicknesses in meters.
inline std::pair<complex_t, complex_t> tmm_reflectance(const MultilayerStack &stack,
                                                       Float cos_i, Float lambda_nm) {
    assert(cos_i > 0 && cos_i <= 1 + 1e-12);
    cos_i = std::min(cos_i, Float(1));
    const Float lambda_m = lambda_nm * 1e-9;

    complex_t n0 = stack.ambient.eval(lambda_nm);
    complex_t n_sub = stack.substrate.eval(lambda_nm);
    Float sin_i = safe_sqrt(1 - cos_i * cos_i);
    complex_t kx = n0 * sin_i;  // conserved tangential index

    auto cos_in = [&](complex_t n) {
        complex_t s = kx / n;
        complex_t c = std::sqrt(complex_t(1, 0) - s * s);
        if ((n * c).imag() < 0) c = -c;
        return c;
    };

    complex_t r[2];
    for (int pol = 0; pol < 2; ++pol) {  // 0: s, 1: p
        auto admittance = [&](complex_t n, complex_t c) {
            return pol == 0 ? n * c : n / c;
        };
        // [B; C] = prod(M_j) [1; q_sub]
        complex_t b(1, 0), c(0, 0);
        complex_t q_sub = admittance(n_sub, cos_in(n_sub));
        c = q_sub;
        // accumulate from the substrate side: M_total = M_1 ... M_L applied to [1; q_sub]
        for (auto it = stack.layers.rbegin(); it != stack.layers.rend(); ++it) {
            complex_t nj = it->ior.eval(lambda_nm);
            complex_t cj = cos_in(nj);
            complex_t qj = admittance(nj, cj);
            complex_t delta = TwoPi / lambda_m * nj * it->thickness * cj;
            complex_t cd = std::cos(delta), sd = std::sin(delta);
            complex_t b2 = cd * b + complex_t(0, 1) * sd / qj * c;
            complex_t c2 = complex_t(0, 1) * qj * sd * b + cd * c;
            b = b2;
            c = c2;
        }
        complex_t q0 = admittance(n0, cos_i);
        r[pol] = (q0 * b - c) / (q0 * b + c);
    }
    return {r[0], r[1]};
}

} // namespace waveray
