// waveray: a spectral wave-optics path tracer
// SPDX-License-Identifier: Apache-2.0

#include <gtest/gtest.h>

#include <waveray/core/rng.hpp>
#include <waveray/oracle/wdf.hpp>

using namespace waveray;
using namespace waveray::oracle;

namespace {

CSDMatrix random_psd_csd(Pcg32 &rng, std::size_t n, int rank) {
    Eigen::MatrixXcd c = Eigen::MatrixXcd::Zero(n, n);
    for (int r = 0; r < rank; ++r) {
        Eigen::VectorXcd v(n);
        for (std::size_t i = 0; i < n; ++i)
            v[(Eigen::Index)i] = complex_t(2 * rng.next_float() - 1, 2 * rng.next_float() - 1);
        c += (0.2 + rng.next_float()) * (v * v.adjoint());
    }
    CSDMatrix out;
    out.c = c;
    out.dr = 0.1;
    out.r0 = -0.05 * (Float)n;
    return out;
}

} // namespace

TEST(Csd, SinglePlaneWaveFullyCoherent) {
    std::size_t n = 64;
    Float extent = 16.0;
    Float kprime = 3 * TwoPi / extent;
    auto f = plane_wave_field(n, extent, kprime);
    auto csd = csd_from_ensemble({f});
    for (std::size_t i = 0; i < n; i += 7)
        for (std::size_t j = 0; j < n; j += 5) {
            complex_t want =
                std::exp(complex_t(0, kprime * (f.r(i) - f.r(j))));
            EXPECT_NEAR(std::abs(csd.c(i, j)), 1.0, 1e-12);
            EXPECT_NEAR(std::abs(csd.c(i, j) - want), 0.0, 1e-12);
        }
    EXPECT_LT(csd.hermitian_residual(), 1e-12);
}

TEST(Csd, RandomPhasePairDecoheres) {
    // two equal-power plane waves with independent uniform random phases
    std::size_t n = 32;
    Float extent = 16.0;
    Float k1 = 2 * TwoPi / extent, k2 = 5 * TwoPi / extent;
    Pcg32 rng(42);
    std::vector<Field1D> ensemble;
    const int m = 10000;
    for (int e = 0; e < m; ++e) {
        auto a = plane_wave_field(n, extent, k1, TwoPi * rng.next_float());
        auto b = plane_wave_field(n, extent, k2, TwoPi * rng.next_float());
        for (std::size_t i = 0; i < n; ++i) a.values[i] += b.values[i];
        ensemble.push_back(std::move(a));
    }
    auto csd = csd_from_ensemble(ensemble);
    // diagonal fluctuates about total power 2 with std sqrt(2)/sqrt(m)
    Float bound = 3.0 / std::sqrt((Float)m) * 2;
    EXPECT_NEAR(csd.c(0, 0).real(), 2.0, bound);
    std::size_t i = 4, j = 20;
    // remove the coherent self terms: the cross terms carry the random phases
    complex_t self = std::exp(complex_t(0, k1 * (csd.r0 + i * csd.dr - (csd.r0 + j * csd.dr)))) +
                     std::exp(complex_t(0, k2 * (csd.r0 + i * csd.dr - (csd.r0 + j * csd.dr))));
    EXPECT_LT(std::abs(csd.c(i, j) - self), bound);
    EXPECT_TRUE(csd.is_psd());
}

TEST(Csd, SingleRealizationIsRankOne) {
    auto f = gaussian_field(48, 12.0, 1.0);
    auto csd = csd_from_ensemble({f});
    Eigen::JacobiSVD<Eigen::MatrixXcd> svd(csd.c);
    auto sv = svd.singularValues();
    EXPECT_GT(sv[0], 0.0);
    for (Eigen::Index i = 1; i < sv.size(); ++i) EXPECT_LT(sv[i], 1e-10 * sv[0]);
}

TEST(Csd, MismatchedGridsThrow) {
    auto a = gaussian_field(32, 8.0, 1.0);
    auto b = gaussian_field(64, 8.0, 1.0);
    EXPECT_THROW(csd_from_ensemble({a, b}), std::invalid_argument);
}

TEST(Wdf, GaussianBeamClosedForm) {
    // W(r,k) = (1/pi) exp(-r^2 / 2 sigma^2 - 2 sigma^2 k^2) for a unit-power beam
    std::size_t n = 256;
    Float extent = 32.0, sigma = 1.0;
    auto f = gaussian_field(n, extent, sigma);
    f.normalize();
    Float residual = 0;
    auto g = wdf_from_csd(csd_from_field(f), &residual);
    EXPECT_LT(residual, 1e-10);
    Float peak = 1 / Pi;
    Float max_err = 0;
    for (std::size_t s = 0; s < g.nr; s += 3)
        for (std::size_t q = 0; q < g.nk; q += 3) {
            Float want = (1 / Pi) * std::exp(-sqr(g.r(s)) / (2 * sigma * sigma) -
                                             2 * sigma * sigma * sqr(g.k(q)));
            max_err = std::max(max_err, std::abs(g.at(s, q) - want));
        }
    EXPECT_LT(max_err / peak, 1e-6);
}

TEST(Wdf, PlaneWaveConcentratesAtPlusK) {
    std::size_t n = 64;
    Float extent = 16.0;
    auto f = plane_wave_field(n, extent, 0);  // k' = 0 is always on-grid
    auto g0 = wdf_from_csd(csd_from_field(f));
    // center row: all mass in the k = 0 bin
    std::size_t mid = g0.nr / 2;
    Float mass = 0, best = 0;
    std::size_t best_q = 0;
    for (std::size_t q = 0; q < g0.nk; ++q) {
        Float v = std::abs(g0.at(mid, q));
        mass += v;
        if (v > best) { best = v; best_q = q; }
    }
    EXPECT_NEAR(g0.k(best_q), 0.0, 1e-12);
    EXPECT_GT(best / mass, 1 - 1e-9);

    // sign convention: e^{+i k' r} lands at positive k
    Float kprime = 4 * g0.dk * 2;  // even multiple keeps it on the csd grid
    auto f2 = plane_wave_field(n, extent, kprime);
    auto g2 = wdf_from_csd(csd_from_field(f2));
    best = 0;
    for (std::size_t q = 0; q < g2.nk; ++q)
        if (g2.at(mid, q) > best) { best = g2.at(mid, q); best_q = q; }
    EXPECT_NEAR(g2.k(best_q), kprime, 1e-9);

    // uniform in r away from the truncated edges
    Float center_val = g2.at(mid, best_q);
    for (std::size_t s = g2.nr / 4; s < 3 * g2.nr / 4; s += 2) {
        Float row_best = 0;
        for (std::size_t q = 0; q < g2.nk; ++q) row_best = std::max(row_best, g2.at(s, q));
        EXPECT_GT(row_best, 0.4 * center_val);
    }
}

TEST(Wdf, TwoPointSourceGoesNegativeAtMidpoint) {
    std::size_t n = 128;
    auto f = two_point_field(n, 32.0, 8.0, 0.5);
    auto g = wdf_from_csd(csd_from_field(f));
    std::size_t mid = g.nr / 2;
    Float min_mid = Infinity, max_all = g.max_value();
    for (std::size_t q = 0; q < g.nk; ++q) min_mid = std::min(min_mid, g.at(mid, q));
    EXPECT_LT(min_mid, -0.05 * max_all);
}

TEST(Wdf, RoundTripIsExact) {
    Pcg32 rng(7);
    for (int trial = 0; trial < 5; ++trial) {
        auto csd = random_psd_csd(rng, 24, 3);
        auto g = wdf_from_csd(csd);
        auto back = csd_from_wdf(g);
        Float max_ref = csd.c.cwiseAbs().maxCoeff();
        Float err = (back.c - csd.c).cwiseAbs().maxCoeff();
        EXPECT_LT(err, 1e-9 * max_ref) << "trial " << trial;
        // and the reverse order: wdf(csd(w)) = w
        auto g2 = wdf_from_csd(back);
        Float werr = 0;
        for (std::size_t i = 0; i < g.w.size(); ++i)
            werr = std::max(werr, std::abs(g.w[i] - g2.w[i]));
        EXPECT_LT(werr, 1e-9 * std::abs(g.max_value()));
    }
}

TEST(Wdf, ZeroWdfGivesZeroCsd) {
    auto f = gaussian_field(32, 8.0, 1.0);
    auto g = wdf_from_csd(csd_from_field(f));
    std::fill(g.w.begin(), g.w.end(), 0.0);
    auto back = csd_from_wdf(g);
    EXPECT_LT(back.c.cwiseAbs().maxCoeff(), 1e-15);
}

TEST(Wdf, MarginalEqualsCsdDiagonal) {
    auto f = gaussian_field(96, 24.0, 1.3, 0.7, 2.0);
    auto csd = csd_from_field(f);
    auto g = wdf_from_csd(csd);
    auto marg = intensity_marginal(g);
    for (std::size_t i = 0; i < csd.size(); ++i) {
        Float want = csd.c((Eigen::Index)i, (Eigen::Index)i).real();
        Float got = marg[2 * i];
        EXPECT_NEAR(got, want, 1e-9 * std::max(Float(1), std::abs(want)));
    }
}

TEST(Wdf, GaussianMarginalPeaksAtCenter) {
    auto f = gaussian_field(128, 32.0, 1.0);
    auto g = wdf_from_csd(csd_from_field(f));
    auto marg = intensity_marginal(g);
    std::size_t best = 0;
    for (std::size_t s = 0; s < marg.size(); ++s)
        if (marg[s] > marg[best]) best = s;
    EXPECT_NEAR(g.r(best), 0.0, g.dr * 1.5);
}

TEST(Propagate, ZeroDistanceIdentity) {
    auto f = gaussian_field(64, 16.0, 1.0);
    auto g = wdf_from_csd(csd_from_field(f));
    auto g2 = propagate_free_space(g, 0.0, 10.0);
    for (std::size_t i = 0; i < g.w.size(); ++i) EXPECT_EQ(g.w[i], g2.w[i]);
}

TEST(Propagate, GaussianSpreadingFormula) {
    // var_r(z) = sigma_r^2 + z^2 sigma_k^2 / k0^2
    std::size_t n = 256;
    Float extent = 64.0, sigma = 1.0, k0 = 5.0;
    auto f = gaussian_field(n, extent, sigma);
    f.normalize();
    auto g = wdf_from_csd(csd_from_field(f));
    auto moments_r = [&](const WDFGrid &w) {
        Float m0 = 0, m1 = 0, m2 = 0;
        auto marg = intensity_marginal(w);
        for (std::size_t s = 0; s < marg.size(); ++s) {
            m0 += marg[s];
            m1 += marg[s] * w.r(s);
        }
        m1 /= m0;
        for (std::size_t s = 0; s < marg.size(); ++s) m2 += marg[s] * sqr(w.r(s) - m1);
        return m2 / m0;
    };
    Float var0 = moments_r(g);
    EXPECT_NEAR(var0, sigma * sigma, 1e-4);
    // distances where every column's shear is an integer number of rows, so the
    // interpolation is exact and the continuum formula can be checked tightly
    Float z_aligned = k0 * g.dr / g.dk;
    for (Float mult : {1.0, 2.0, 4.0}) {
        Float z = mult * z_aligned;
        auto gz = propagate_free_space(g, z, k0);
        Float sigma_k = 1 / (2 * sigma);
        Float want = sigma * sigma + sqr(z * sigma_k / k0);
        EXPECT_NEAR(moments_r(gz), want, 1e-4 * want) << "z " << z;
    }
    // generic distances broaden by at most the interpolation bound dr^2/4
    for (Float z : {5.0, 10.0}) {
        auto gz = propagate_free_space(g, z, k0);
        Float sigma_k = 1 / (2 * sigma);
        Float want = sigma * sigma + sqr(z * sigma_k / k0);
        Float got = moments_r(gz);
        EXPECT_GE(got, want - 1e-4);
        EXPECT_LE(got, want + g.dr * g.dr / 4 + 1e-4);
    }
}

TEST(Propagate, TotalPowerPreserved) {
    auto f = gaussian_field(256, 64.0, 1.0);
    f.normalize();
    auto g = wdf_from_csd(csd_from_field(f));
    Float before = g.total();
    auto gz = propagate_free_space(g, 15.0, 5.0);
    EXPECT_NEAR(gz.total(), before, 1e-6 * std::abs(before));
}

TEST(Propagate, GroupAction) {
    auto f = gaussian_field(256, 64.0, 1.5);
    f.normalize();
    auto g = wdf_from_csd(csd_from_field(f));
    auto ab = propagate_free_space(propagate_free_space(g, 4.0, 5.0), 6.0, 5.0);
    auto once = propagate_free_space(g, 10.0, 5.0);
    Float num = 0, den = 0;
    for (std::size_t i = 0; i < g.w.size(); ++i) {
        num += sqr(ab.w[i] - once.w[i]);
        den += sqr(once.w[i]);
    }
    EXPECT_LT(std::sqrt(num / den), 1e-2);
}

TEST(Husimi, TwoPointSourceBecomesNonNegative) {
    auto f = two_point_field(128, 32.0, 8.0, 0.5);
    auto g = wdf_from_csd(csd_from_field(f));
    ASSERT_LT(g.min_value(), 0.0);
    GaussianPhasePoint cell;
    cell.sigma_r = 0.5;
    cell.sigma_k = 1.0;
    auto smooth = husimi_smooth(g, cell);
    EXPECT_GE(smooth.min_value(), -1e-9 * smooth.max_value());
}

TEST(Husimi, GaussianVariancesAdd) {
    std::size_t n = 256;
    Float sigma = 1.0;
    auto f = gaussian_field(n, 64.0, sigma);
    f.normalize();
    auto g = wdf_from_csd(csd_from_field(f));
    GaussianPhasePoint cell;
    cell.sigma_r = 0.7;
    cell.sigma_k = 0.5 / cell.sigma_r;
    auto smooth = husimi_smooth(g, cell);
    // r-variance of the smoothed distribution: sigma^2 + sigma_cell^2
    auto marg = intensity_marginal(smooth);
    Float m0 = 0, m1 = 0, m2 = 0;
    for (std::size_t s = 0; s < marg.size(); ++s) { m0 += marg[s]; m1 += marg[s] * smooth.r(s); }
    m1 /= m0;
    for (std::size_t s = 0; s < marg.size(); ++s) m2 += marg[s] * sqr(smooth.r(s) - m1);
    Float want = sigma * sigma + sqr(cell.sigma_r);
    EXPECT_NEAR(m2 / m0, want, 0.01 * want);
}

TEST(Husimi, ZeroInZeroOut) {
    WDFGrid g;
    g.nr = 33;
    g.nk = 17;
    g.dr = 0.1;
    g.dk = 0.2;
    g.r0 = -1.6;
    g.k0 = -1.6;
    g.w.assign(g.nr * g.nk, 0.0);
    GaussianPhasePoint cell;
    cell.sigma_r = 0.3;
    cell.sigma_k = 0.5 / 0.3;
    auto smooth = husimi_smooth(g, cell);
    for (Float v : smooth.w) EXPECT_EQ(v, 0.0);
}

TEST(Husimi, NonMinimumCellThrows) {
    auto f = gaussian_field(32, 8.0, 1.0);
    auto g = wdf_from_csd(csd_from_field(f));
    GaussianPhasePoint cell;
    cell.sigma_r = 1.0;
    cell.sigma_k = 1.0;  // product 1, not 1/2
    EXPECT_THROW(husimi_smooth(g, cell), std::invalid_argument);
}

TEST(Husimi, NonNegativeForRandomPsdInputs) {
    Pcg32 rng(19);
    for (int trial = 0; trial < 3; ++trial) {
        // smooth random PSD ensembles: random gaussian wave packets
        std::vector<Field1D> fields;
        for (int e = 0; e < 6; ++e) {
            Float mu = 6 * (2 * rng.next_float() - 1);
            Float s = 0.8 + rng.next_float();
            Float kb = 2 * (2 * rng.next_float() - 1);
            fields.push_back(gaussian_field(128, 40.0, s, mu, kb));
        }
        auto g = wdf_from_csd(csd_from_ensemble(fields));
        GaussianPhasePoint cell;
        cell.sigma_r = 0.6;
        cell.sigma_k = 0.5 / 0.6;
        auto smooth = husimi_smooth(g, cell);
        EXPECT_GE(smooth.min_value(), -1e-9 * smooth.max_value()) << "trial " << trial;
    }
}
