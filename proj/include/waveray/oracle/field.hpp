// waveray: a spectral wave-optics path tracer
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <complex>
#include <stdexcept>
#include <vector>

#include "../core/math.hpp"

namespace waveray::oracle {

/// Uniformly sampled 1-D transverse wave function.
struct Field1D {
    std::vector<complex_t> values;
    Float dr = 1;   // sample spacing [m]
    Float r0 = 0;   // coordinate of sample 0 [m]

    std::size_t size() const { return values.size(); }
    Float r(std::size_t i) const { return r0 + (Float)i * dr; }

    Float norm2() const {
        Float acc = 0;
        for (auto &v : values) acc += std::norm(v);
        return acc * dr;
    }

    Field1D &normalize() {
        Float n = std::sqrt(norm2());
        if (n <= 0) throw std::invalid_argument("cannot normalize zero field");
        for (auto &v : values) v /= n;
        return *this;
    }
};

/// Centered grid: N samples covering [-extent/2, extent/2).
inline Field1D make_field_grid(std::size_t n, Float extent) {
    Field1D f;
    f.values.assign(n, complex_t(0, 0));
    f.dr = extent / (Float)n;
    f.r0 = -extent / 2;
    return f;
}

/// Gaussian beam psi ~ exp(-(r-mu)^2 / (4 sigma^2) + i kbar r + i chirp r^2).
/// sigma is the std of |psi|^2.
inline Field1D gaussian_field(std::size_t n, Float extent, Float sigma, Float mu = 0,
                              Float kbar = 0, Float chirp = 0) {
    Field1D f = make_field_grid(n, extent);
    for (std::size_t i = 0; i < n; ++i) {
        Float r = f.r(i);
        Float x = r - mu;
        Float amp = std::exp(-x * x / (4 * sigma * sigma));
        Float phase = kbar * r + chirp * r * r;
        f.values[i] = amp * complex_t(std::cos(phase), std::sin(phase));
    }
    return f;
}

inline Field1D plane_wave_field(std::size_t n, Float extent, Float kprime, Float phase0 = 0) {
    Field1D f = make_field_grid(n, extent);
    for (std::size_t i = 0; i < n; ++i) {
        Float ph = kprime * f.r(i) + phase0;
        f.values[i] = complex_t(std::cos(ph), std::sin(ph));
    }
    return f;
}

/// Symmetric pair of narrow Gaussian emitters separated by `separation`.
inline Field1D two_point_field(std::size_t n, Float extent, Float separation, Float spike_sigma,
                               Float rel_phase = 0) {
    Field1D f = make_field_grid(n, extent);
    for (std::size_t i = 0; i < n; ++i) {
        Float r = f.r(i);
        Float a = std::exp(-sqr(r - separation / 2) / (4 * spike_sigma * spike_sigma));
        Float b = std::exp(-sqr(r + separation / 2) / (4 * spike_sigma * spike_sigma));
        f.values[i] = complex_t(a, 0) + b * complex_t(std::cos(rel_phase), std::sin(rel_phase));
    }
    return f;
}

/// Discrete Fourier conjugate on the centered grid k_q = (q - N/2) * 2pi/(N dr).
inline Field1D fourier_conjugate(const Field1D &f) {
    const std::size_t n = f.size();
    if (n == 0) throw std::invalid_argument("empty field");
    Field1D out;
    out.values.assign(n, complex_t(0, 0));
    out.dr = TwoPi / ((Float)n * f.dr);
    out.r0 = -out.dr * (Float)(n / 2);
    const Float scale = f.dr / std::sqrt(TwoPi);
    for (std::size_t q = 0; q < n; ++q) {
        Float k = out.r(q);
        complex_t acc(0, 0);
        for (std::size_t i = 0; i < n; ++i) {
            Float ph = -k * f.r(i);
            acc += f.values[i] * complex_t(std::cos(ph), std::sin(ph));
        }
        out.values[q] = acc * scale;
    }
    return out;
}

struct UncertaintyReport {
    Float sigma_r, sigma_k, product;
};

/// Standard deviations of |psi|^2 and |psi~|^2 about their means.
inline UncertaintyReport uncertainty_product(const Field1D &f) {
    if (f.norm2() <= 0) throw std::invalid_argument("uncertainty_product: zero field");
    auto moments = [](const Field1D &g) {
        Float w = 0, m1 = 0;
        for (std::size_t i = 0; i < g.size(); ++i) {
            Float p = std::norm(g.values[i]);
            w += p;
            m1 += p * g.r(i);
        }
        m1 /= w;
        Float m2 = 0;
        for (std::size_t i = 0; i < g.size(); ++i)
            m2 += std::norm(g.values[i]) * sqr(g.r(i) - m1);
        return std::sqrt(m2 / w);
    };
    UncertaintyReport rep;
    rep.sigma_r = moments(f);
    rep.sigma_k = moments(fourier_conjugate(f));
    rep.product = rep.sigma_r * rep.sigma_k;
    return rep;
}

/// Minimum-uncertainty Gaussian phase-space point (a generalized ray).
struct GaussianPhasePoint {
    Float mean_r = 0;   // [m]
    Float mean_k = 0;   // [rad/m]
    Float sigma_r = 1;  // [m]
    Float sigma_k = 0.5;// [rad/m]
    Float weight = 1;   // intensity I_n >= 0

    bool minimum_uncertainty(Float tol = 1e-9) const {
        return std::abs(sigma_r * sigma_k - 0.5) <= tol;
    }
};

} // namespace waveray::oracle
