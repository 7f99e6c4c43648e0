// waveray: a spectral wave-optics path tracer
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <stdexcept>
#include <vector>

#include "../core/rng.hpp"
#include "spectrum.hpp"

namespace waveray {

/// Hero wavelength plus up to three emission-sampled secondaries.
struct WavelengthSet {
    Float hero = 0;
    Float hero_pdf = 0;                 // 1/nm
    std::vector<Float> secondaries;     // empty on dispersive-delta paths
    std::vector<Float> secondary_pdfs;  // 1/nm, matching secondaries

    std::size_t count() const { return 1 + secondaries.size(); }
    Float lambda(std::size_t i) const { return i == 0 ? hero : secondaries[i - 1]; }
    Float pdf(std::size_t i) const { return i == 0 ? hero_pdf : secondary_pdfs[i - 1]; }

    void drop_secondaries() {
        secondaries.clear();
        secondary_pdfs.clear();
    }
};

/// Uniform hero wavelength over the visible range.
inline std::pair<Float, Float> sample_hero_wavelength(Float u) {
    return {LambdaMin + LambdaSpan * u, 1 / LambdaSpan};
}

inline Float hero_wavelength_pdf(Float lambda) {
    return (lambda >= LambdaMin && lambda < LambdaMax) ? 1 / LambdaSpan : 0;
}

/// Inverse-CDF table over the emission spectrum, discretized into 1 nm cells with
/// atoms at integer wavelengths 380..699. Returned pdfs are exact for this
/// discretized density.
class EmissionSampler {
public:
    explicit EmissionSampler(const Spectrum &e) {
        const int n = (int)LambdaSpan;
        m_mass.resize(n);
        Float total = 0;
        for (int i = 0; i < n; ++i) {
            Float v = e.eval(LambdaMin + i);
            if (v < 0) v = 0;
            m_mass[i] = v;
            total += v;
        }
        if (total <= 0)
            throw std::invalid_argument("emission spectrum is zero over the visible range");
        m_cdf.resize(n + 1);
        m_cdf[0] = 0;
        for (int i = 0; i < n; ++i) m_cdf[i + 1] = m_cdf[i] + m_mass[i] / total;
        m_cdf[n] = 1;
        m_total = total;
    }

    /// Draw one wavelength; pdf in 1/nm.
    std::pair<Float, Float> sample(Float u) const {
        std::size_t lo = 0, hi = m_cdf.size() - 1;
        while (hi - lo > 1) {
            std::size_t mid = (lo + hi) / 2;
            if (m_cdf[mid] <= u) lo = mid; else hi = mid;
        }
        Float lambda = LambdaMin + (Float)lo;
        return {lambda, pdf(lambda)};
    }

    Float pdf(Float lambda) const {
        int i = (int)std::floor(lambda - LambdaMin);
        if (i < 0 || i >= (int)m_mass.size()) return 0;
        return m_mass[i] / m_total;  // cell width 1 nm
    }

    /// Sum of cell pdf * width; equals 1 by construction.
    Float pdf_integral() const {
        Float acc = 0;
        for (Float m : m_mass) acc += m / m_total;
        return acc;
    }

private:
    std::vector<Float> m_mass;
    std::vector<Float> m_cdf;
    Float m_total = 0;
};

/// The three emission-sampled solve-stage wavelengths.
inline std::vector<std::pair<Float, Float>> sample_emission_wavelengths(
    const EmissionSampler &sampler, Pcg32 &rng) {
    std::vector<std::pair<Float, Float>> out;
    out.reserve(3);
    for (int i = 0; i < 3; ++i) out.push_back(sampler.sample(rng.next_float()));
    return out;
}

} // namespace waveray
