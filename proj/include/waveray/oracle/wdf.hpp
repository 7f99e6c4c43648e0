// waveray: a spectral wave-optics path tracer
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <Eigen/Dense>

#include "field.hpp"

namespace waveray::oracle {

/// Hermitian two-point correlation matrix C[i][j] = <psi(r_i) psi*(r_j)>.
struct CSDMatrix {
    Eigen::MatrixXcd c;
    Float dr = 1;
    Float r0 = 0;

    std::size_t size() const { return (std::size_t)c.rows(); }

    Float hermitian_residual() const {
        return (c - c.adjoint()).cwiseAbs().maxCoeff();
    }

    Float min_eigenvalue() const {
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(c, Eigen::EigenvaluesOnly);
        return es.eigenvalues().minCoeff();
    }

    bool is_psd(Float tol_scale = 1e-9) const {
        return min_eigenvalue() >= -tol_scale * std::abs(c.real().trace());
    }
};

inline CSDMatrix csd_from_ensemble(const std::vector<Field1D> &realizations) {
    if (realizations.empty()) throw std::invalid_argument("csd_from_ensemble: no realizations");
    const auto &first = realizations.front();
    const std::size_t n = first.size();
    for (auto &f : realizations)
        if (f.size() != n || f.dr != first.dr || f.r0 != first.r0)
            throw std::invalid_argument("csd_from_ensemble: mismatched grids");
    CSDMatrix out;
    out.dr = first.dr;
    out.r0 = first.r0;
    out.c = Eigen::MatrixXcd::Zero(n, n);
    for (auto &f : realizations) {
        Eigen::Map<const Eigen::VectorXcd> v(f.values.data(), n);
        out.c.noalias() += v * v.adjoint();
    }
    out.c /= (Float)realizations.size();
    return out;
}

inline CSDMatrix csd_from_field(const Field1D &f) { return csd_from_ensemble({f}); }

/// Real-valued phase-space distribution on an (r, k) lattice. The transform pair
/// below places r-centers at half-sample steps (2N-1 rows) and k on the conjugate
/// grid (N columns), where the discrete transform inverts exactly.
struct WDFGrid {
    std::vector<Float> w;  // row-major, nr x nk
    std::size_t nr = 0, nk = 0;
    Float r0 = 0, dr = 1;  // row coordinates: r0 + s*dr
    Float k0 = 0, dk = 1;  // column coordinates: k0 + q*dk

    Float &at(std::size_t s, std::size_t q) { return w[s * nk + q]; }
    Float at(std::size_t s, std::size_t q) const { return w[s * nk + q]; }
    Float r(std::size_t s) const { return r0 + (Float)s * dr; }
    Float k(std::size_t q) const { return k0 + (Float)q * dk; }

    Float min_value() const { return *std::min_element(w.begin(), w.end()); }
    Float max_value() const { return *std::max_element(w.begin(), w.end()); }

    /// Phase-space quadrature of the grid: total power.
    Float total() const {
        Float acc = 0;
        for (Float v : w) acc += v;
        return acc * dr * dk;
    }
};

/// W(r, k) = (1/2pi) Int dx C(r + x/2, r - x/2) e^{-i x k}.
/// The conjugated argument rides at r - x/2, so a plane wave e^{i k' r}
/// concentrates at k = +k'. Imaginary residue of the transform is returned
/// through *imag_residual when requested.
inline WDFGrid wdf_from_csd(const CSDMatrix &csd, Float *imag_residual = nullptr) {
    if (csd.hermitian_residual() > 1e-10 * (1 + csd.c.cwiseAbs().maxCoeff()))
        throw std::invalid_argument("wdf_from_csd: input not Hermitian");
    const std::size_t n = csd.size();
    WDFGrid g;
    g.nr = 2 * n - 1;
    g.nk = n;
    g.dr = csd.dr / 2;
    g.r0 = csd.r0;
    g.dk = Pi / ((Float)n * csd.dr);
    g.k0 = -g.dk * (Float)(n / 2);
    g.w.assign(g.nr * g.nk, 0);

    Float max_imag = 0, max_val = 0;
    for (std::size_t s = 0; s < g.nr; ++s) {
        // offsets d = i - j with i = (s+d)/2, j = (s-d)/2 on the original grid
        const long smax = std::min<long>((long)s, (long)(2 * n - 2 - s));
        for (std::size_t q = 0; q < g.nk; ++q) {
            const Float k = g.k(q);
            complex_t acc(0, 0);
            for (long d = -smax + (((long)s + smax) % 2); d <= smax; d += 2) {
                const long i = ((long)s + d) / 2, j = ((long)s - d) / 2;
                Float ph = -(Float)d * csd.dr * k;
                acc += csd.c((Eigen::Index)i, (Eigen::Index)j) *
                       complex_t(std::cos(ph), std::sin(ph));
            }
            acc *= csd.dr / Pi;
            g.at(s, q) = acc.real();
            max_imag = std::max(max_imag, std::abs(acc.imag()));
            max_val = std::max(max_val, std::abs(acc.real()));
        }
    }
    if (imag_residual) *imag_residual = max_val > 0 ? max_imag / max_val : 0;
    return g;
}

/// Exact inverse of wdf_from_csd on the paired grids.
inline CSDMatrix csd_from_wdf(const WDFGrid &g) {
    if (g.nr != 2 * g.nk - 1)
        throw std::invalid_argument("csd_from_wdf: grid is not a paired transform grid");
    const std::size_t n = g.nk;
    CSDMatrix out;
    out.dr = g.dr * 2;
    out.r0 = g.r0;
    out.c = Eigen::MatrixXcd::Zero(n, n);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j) {
            const long s = (long)(i + j);
            const long d = (long)i - (long)j;
            complex_t acc(0, 0);
            for (std::size_t q = 0; q < g.nk; ++q) {
                Float ph = (Float)d * out.dr * g.k(q);
                acc += g.at((std::size_t)s, q) * complex_t(std::cos(ph), std::sin(ph));
            }
            out.c((Eigen::Index)i, (Eigen::Index)j) = acc * Pi / (out.dr * (Float)n);
        }
    return out;
}

/// I(r) = Int dk W(r, k); on even rows this equals the CSD diagonal exactly.
inline std::vector<Float> intensity_marginal(const WDFGrid &g) {
    std::vector<Float> out(g.nr, 0);
    for (std::size_t s = 0; s < g.nr; ++s) {
        Float acc = 0;
        for (std::size_t q = 0; q < g.nk; ++q) acc += g.at(s, q);
        out[s] = acc * g.dk;
    }
    return out;
}

/// Free-space shear W_o(r, k) = W_i(r - z k / k0_wavenumber, k) by linear
/// interpolation along r (out-of-support reads are zero).
inline WDFGrid propagate_free_space(const WDFGrid &g, Float distance, Float wavenumber) {
    assert(distance >= 0 && wavenumber > 0);
    WDFGrid out = g;
    for (std::size_t q = 0; q < g.nk; ++q) {
        const Float shift = distance * g.k(q) / wavenumber / g.dr;  // in row units
        for (std::size_t s = 0; s < g.nr; ++s) {
            Float pos = (Float)s - shift;
            Float val = 0;
            if (pos >= 0 && pos <= (Float)(g.nr - 1)) {
                std::size_t lo = (std::size_t)pos;
                if (lo == g.nr - 1) lo--;
                Float t = pos - (Float)lo;
                val = (1 - t) * g.at(lo, q) + t * g.at(lo + 1, q);
            }
            out.at(s, q) = val;
        }
    }
    return out;
}

/// Convolution with a minimum-uncertainty Gaussian cell (sigma_r sigma_k = 1/2).
/// Guarantees non-negativity for physically-realizable inputs.
inline WDFGrid husimi_smooth(const WDFGrid &g, const GaussianPhasePoint &cell) {
    if (!cell.minimum_uncertainty())
        throw std::invalid_argument("husimi_smooth: cell must satisfy sigma_r sigma_k = 1/2");
    auto kernel = [](Float sigma, Float step, std::vector<Float> &k) {
        long half = (long)std::ceil(8 * sigma / step);
        k.resize(2 * half + 1);
        Float sum = 0;
        for (long i = -half; i <= half; ++i) {
            Float v = std::exp(-sqr((Float)i * step) / (2 * sigma * sigma));
            k[(std::size_t)(i + half)] = v;
            sum += v;
        }
        for (auto &v : k) v /= sum;  // discrete mass 1: preserves total power
        return half;
    };
    std::vector<Float> kr, kk;
    long hr = kernel(cell.sigma_r, g.dr, kr);
    long hk = kernel(cell.sigma_k, g.dk, kk);

    WDFGrid tmp = g, out = g;
    // rows (r direction)
    for (std::size_t q = 0; q < g.nk; ++q)
        for (std::size_t s = 0; s < g.nr; ++s) {
            Float acc = 0;
            for (long o = -hr; o <= hr; ++o) {
                long src = (long)s + o;
                if (src < 0 || src >= (long)g.nr) continue;
                acc += g.at((std::size_t)src, q) * kr[(std::size_t)(o + hr)];
            }
            tmp.at(s, q) = acc;
        }
    // columns (k direction)
    for (std::size_t s = 0; s < g.nr; ++s)
        for (std::size_t q = 0; q < g.nk; ++q) {
            Float acc = 0;
            for (long o = -hk; o <= hk; ++o) {
                long src = (long)q + o;
                if (src < 0 || src >= (long)g.nk) continue;
                acc += tmp.at(s, (std::size_t)src) * kk[(std::size_t)(o + hk)];
            }
            out.at(s, q) = acc;
        }
    return out;
}

} // namespace waveray::oracle
