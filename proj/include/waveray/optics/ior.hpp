// waveray: a spectral wave-optics path tracer
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <array>
#include <stdexcept>
#include <utility>
#include <vector>

#include "../core/math.hpp"

namespace waveray {

/// Cauchy dispersion eta(lambda) = A + B / lambda^2, lambda in micrometers.
inline Float cauchy_ior(Float lambda_nm, Float a, Float b_um2) {
    assert(lambda_nm > 0);
    Float lambda_um = lambda_nm * 1e-3;
    return a + b_um2 / (lambda_um * lambda_um);
}

/// Wavelength-dependent complex refractive index.
/// Dielectrics use Cauchy dispersion; conductors use measured tabulated eta + i*kappa.
class RefractiveIndex {
public:
    static RefractiveIndex constant(Float eta) { return cauchy(eta, 0); }

    static RefractiveIndex cauchy(Float a, Float b_um2) {
        if (a <= 0) throw std::invalid_argument("cauchy: real index must be positive");
        if (b_um2 < 0) throw std::invalid_argument("cauchy: B must be non-negative");
        RefractiveIndex r;
        r.m_kind = Kind::Cauchy;
        r.m_a = a;
        r.m_b = b_um2;
        return r;
    }

    /// rows: (lambda_nm, eta, kappa), sorted by lambda. Linear interpolation, clamped.
    static RefractiveIndex tabulated(std::vector<std::array<Float, 3>> rows) {
        if (rows.empty()) throw std::invalid_argument("tabulated ior: empty table");
        for (std::size_t i = 0; i < rows.size(); ++i) {
            if (rows[i][1] <= 0)
                throw std::invalid_argument("tabulated ior: real part must be positive");
            if (i > 0 && rows[i][0] <= rows[i - 1][0])
                throw std::invalid_argument("tabulated ior: wavelengths must be increasing");
        }
        RefractiveIndex r;
        r.m_kind = Kind::Tabulated;
        r.m_rows = std::move(rows);
        return r;
    }

    complex_t eval(Float lambda_nm) const {
        if (m_kind == Kind::Cauchy)
            return complex_t(cauchy_ior(lambda_nm, m_a, m_b), 0);
        auto &rows = m_rows;
        Float eta = interp_sorted(rows.size(), [&](std::size_t i) { return rows[i][0]; },
                                  [&](std::size_t i) { return rows[i][1]; }, lambda_nm);
        Float kappa = interp_sorted(rows.size(), [&](std::size_t i) { return rows[i][0]; },
                                    [&](std::size_t i) { return rows[i][2]; }, lambda_nm);
        return complex_t(eta, kappa);
    }

    Float eval_real(Float lambda_nm) const { return eval(lambda_nm).real(); }

    /// True when the index varies with wavelength (drives the secondaries-drop rule).
    bool dispersive() const {
        if (m_kind == Kind::Cauchy) return m_b > 0;
        for (std::size_t i = 1; i < m_rows.size(); ++i)
            if (m_rows[i][1] != m_rows[0][1] || m_rows[i][2] != m_rows[0][2]) return true;
        return false;
    }

    bool conductive() const {
        if (m_kind == Kind::Cauchy) return false;
        for (auto &r : m_rows)
            if (r[2] != 0) return true;
        return false;
    }

private:
    enum class Kind { Cauchy, Tabulated };
    Kind m_kind = Kind::Cauchy;
    Float m_a = 1, m_b = 0;
    std::vector<std::array<Float, 3>> m_rows;
};

} // namespace waveray
