// waveray: a spectral wave-optics path tracer
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <array>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "../core/math.hpp"

namespace waveray {

constexpr Float LambdaMin = 380;  // nm, configured visible range
constexpr Float LambdaMax = 700;
constexpr Float LambdaSpan = LambdaMax - LambdaMin;

/// Emission / sensitivity spectrum over the visible range.
class Spectrum {
public:
    static Spectrum constant(Float v) {
        Spectrum s;
        s.m_kind = Kind::Constant;
        s.m_scale = v;
        return s;
    }

    /// Planck spectral radiance, W sr^-1 m^-2 nm^-1 times `scale`.
    static Spectrum blackbody(Float temperature_k, Float scale = 1) {
        if (temperature_k <= 0) throw std::invalid_argument("blackbody: T must be positive");
        Spectrum s;
        s.m_kind = Kind::Blackbody;
        s.m_temperature = temperature_k;
        s.m_scale = scale;
        return s;
    }

    static Spectrum tabulated(std::vector<std::array<Float, 2>> rows, Float scale = 1) {
        if (rows.empty()) throw std::invalid_argument("tabulated spectrum: empty table");
        for (std::size_t i = 1; i < rows.size(); ++i)
            if (rows[i][0] <= rows[i - 1][0])
                throw std::invalid_argument("tabulated spectrum: wavelengths must be increasing");
        Spectrum s;
        s.m_kind = Kind::Tabulated;
        s.m_rows = std::move(rows);
        s.m_scale = scale;
        return s;
    }

    Float eval(Float lambda_nm) const {
        switch (m_kind) {
            case Kind::Constant: return m_scale;
            case Kind::Blackbody: return m_scale * planck(lambda_nm, m_temperature);
            case Kind::Tabulated:
                return m_scale * interp_sorted(
                           m_rows.size(), [&](std::size_t i) { return m_rows[i][0]; },
                           [&](std::size_t i) { return m_rows[i][1]; }, lambda_nm);
        }
        return 0;
    }

    static Float planck(Float lambda_nm, Float t) {
        constexpr Float h = 6.62607015e-34, c = 2.99792458e8, kb = 1.380649e-23;
        Float lm = lambda_nm * 1e-9;
        Float x = h * c / (lm * kb * t);
        // per-nm spectral radiance
        return 2 * h * c * c / (lm * lm * lm * lm * lm) / std::expm1(x) * 1e-9;
    }

private:
    enum class Kind { Constant, Blackbody, Tabulated };
    Kind m_kind = Kind::Constant;
    Float m_scale = 1;
    Float m_temperature = 0;
    std::vector<std::array<Float, 2>> m_rows;
};

/// Two-column (or three-column) whitespace-delimited text: lambda_nm value [value2].
/// '#' starts a comment. Shared by emission spectra and tabulated IORs.
inline std::vector<std::vector<Float>> load_spectral_rows(const std::string &path,
                                                          std::size_t min_cols,
                                                          std::size_t max_cols) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open spectral file: " + path);
    std::vector<std::vector<Float>> rows;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        auto hash = line.find('#');
        if (hash != std::string::npos) line = line.substr(0, hash);
        std::istringstream ls(line);
        std::vector<Float> vals;
        Float v;
        while (ls >> v) vals.push_back(v);
        if (vals.empty()) continue;
        if (vals.size() < min_cols || vals.size() > max_cols)
            throw std::runtime_error(path + ":" + std::to_string(line_no) +
                                     ": expected " + std::to_string(min_cols) + "-" +
                                     std::to_string(max_cols) + " columns");
        rows.push_back(std::move(vals));
    }
    if (rows.empty()) throw std::runtime_error(path + ": no data rows");
    return rows;
}

inline Spectrum load_spectrum(const std::string &path, Float scale = 1) {
    auto raw = load_spectral_rows(path, 2, 2);
    std::vector<std::array<Float, 2>> rows;
    rows.reserve(raw.size());
    for (auto &r : raw) rows.push_back({r[0], r[1]});
    return Spectrum::tabulated(std::move(rows), scale);
}

} // namespace waveray
