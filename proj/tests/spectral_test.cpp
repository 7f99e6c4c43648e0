// waveray: a spectral wave-optics path tracer
// SPDX-License-Identifier: Apache-2.0

#include <gtest/gtest.h>

#include <waveray/core/rng.hpp>
#include <waveray/optics/cie.hpp>
#include <waveray/optics/ior.hpp>
#include <waveray/optics/mueller.hpp>
#include <waveray/optics/wavelength.hpp>

#include "test_util.hpp"

using namespace waveray;

TEST(CauchyIor, PrismFromDispersion) {
    // A back-solved so that eta(550 nm) = 1.2 with B = 0.005 um^2
    EXPECT_NEAR(cauchy_ior(550, 1.183471, 0.005), 1.200, 1e-3);
    // direct arithmetic: A + B / 0.16
    EXPECT_NEAR(cauchy_ior(400, 1.183471, 0.005), 1.183471 + 0.005 / 0.16, 1e-12);
    EXPECT_NEAR(cauchy_ior(400, 1.183471, 0.005), 1.21472, 1e-5);
}

TEST(CauchyIor, DispersionFree) {
    for (Float l : {380.0, 550.0, 700.0}) EXPECT_EQ(cauchy_ior(l, 1.5, 0), 1.5);
}

TEST(CauchyIor, StrictlyDecreasingInLambda) {
    Float prev = Infinity;
    for (Float l = 380; l <= 700; l += 10) {
        Float v = cauchy_ior(l, 1.5, 0.01);
        EXPECT_LT(v, prev);
        prev = v;
    }
}

TEST(Fresnel, NormalIncidenceDielectric) {
    auto f = fresnel_mueller(1.0, 1.0, complex_t(1.5, 0));
    EXPECT_NEAR(f.reflect.m[0][0], 0.04, 1e-12);
    EXPECT_FALSE(f.tir);
}

TEST(Fresnel, BrewsterAngle) {
    Float theta_b = std::atan(1.5);
    auto amp = fresnel_amplitudes(std::cos(theta_b), 1.0, complex_t(1.5, 0));
    EXPECT_NEAR(std::abs(amp.r_p), 0.0, 1e-12);
    EXPECT_GT(std::abs(amp.r_s), 0.1);
}

TEST(Fresnel, ConductorNormalIncidence) {
    // independent oracle: R = ((eta-1)^2 + kappa^2) / ((eta+1)^2 + kappa^2)
    Float eta = 0.27, kappa = 2.78;
    Float expected = (sqr(eta - 1) + sqr(kappa)) / (sqr(eta + 1) + sqr(kappa));
    EXPECT_NEAR(expected, 0.8843844, 1e-6);
    auto f = fresnel_mueller(1.0, 1.0, complex_t(eta, kappa));
    EXPECT_NEAR(f.reflect.m[0][0], expected, 1e-12);
}

TEST(Fresnel, TotalInternalReflection) {
    // glass to air beyond the critical angle
    Float cos_i = std::cos(deg_to_rad(60.0));
    auto f = fresnel_mueller(cos_i, 1.5, complex_t(1.0, 0));
    EXPECT_TRUE(f.tir);
    for (int i = 0; i < 4; ++i)
        for (int j = 0; j < 4; ++j) EXPECT_EQ(f.transmit.m[i][j], 0.0);
    EXPECT_NEAR(f.reflect.m[0][0], 1.0, 1e-12);
}

TEST(Fresnel, DielectricEnergyClosure) {
    // below the critical angle, R + (power factor) T = 1 per polarization
    for (Float deg : {0.0, 15.0, 30.0, 45.0, 60.0, 75.0, 89.0}) {
        Float ci = std::cos(deg_to_rad(deg));
        auto amp = fresnel_amplitudes(ci, 1.0, complex_t(1.5, 0));
        Float factor = fresnel_transmit_factor(ci, 1.0, 1.5, amp.cos_t.real());
        EXPECT_NEAR(std::norm(amp.r_s) + factor * std::norm(amp.t_s), 1.0, 1e-12);
        EXPECT_NEAR(std::norm(amp.r_p) + factor * std::norm(amp.t_p), 1.0, 1e-12);

        auto fm = fresnel_mueller(ci, 1.0, complex_t(1.5, 0));
        EXPECT_NEAR(fm.reflect.m[0][0] + fm.transmit_power_factor * fm.transmit.m[0][0], 1.0,
                    1e-12);
    }
}

static StokesVector random_valid_stokes(Pcg32 &rng) {
    Float s0 = rng.next_float() * 4;
    Float dop = rng.next_float();
    Float z = 2 * rng.next_float() - 1;
    Float phi = TwoPi * rng.next_float();
    Float r = std::sqrt(1 - z * z);
    return {s0, s0 * dop * r * std::cos(phi), s0 * dop * r * std::sin(phi), s0 * dop * z};
}

TEST(Mueller, StokesValidityClosedUnderFresnelProducts) {
    Pcg32 rng(7);
    for (int trial = 0; trial < 2000; ++trial) {
        StokesVector s = random_valid_stokes(rng);
        ASSERT_TRUE(s.valid());
        // random chain of fresnel reflections and frame rotations
        int n = 1 + (int)(rng.next_float() * 3);
        for (int i = 0; i < n; ++i) {
            Float ci = 0.01 + 0.99 * rng.next_float();
            complex_t eta = rng.next_float() < 0.5
                                ? complex_t(1.1 + rng.next_float(), 0)
                                : complex_t(0.2 + rng.next_float(), 3 * rng.next_float());
            auto f = fresnel_mueller(ci, 1.0, eta);
            s = MuellerMatrix::rotator(TwoPi * rng.next_float()) * (f.reflect * s);
        }
        EXPECT_TRUE(s.valid(1e-9)) << "trial " << trial;
        EXPECT_GE(s.s0, 0.0);
    }
}

TEST(Mueller, RotatorComposition) {
    auto r1 = MuellerMatrix::rotator(0.3), r2 = MuellerMatrix::rotator(-0.3);
    auto id = r1 * r2;
    for (int i = 0; i < 4; ++i)
        for (int j = 0; j < 4; ++j) EXPECT_NEAR(id.m[i][j], i == j ? 1 : 0, 1e-14);
}

TEST(Mueller, DepolarizerKillsPolarization) {
    auto d = MuellerMatrix::depolarizer(0.8 * InvPi);
    StokesVector s = d * StokesVector{2, 1, -0.5, 0.3};
    EXPECT_NEAR(s.s0, 1.6 * InvPi, 1e-15);
    EXPECT_EQ(s.s1, 0.0);
    EXPECT_EQ(s.s2, 0.0);
    EXPECT_EQ(s.s3, 0.0);
}

TEST(HeroWavelength, Endpoints) {
    auto [l0, p0] = sample_hero_wavelength(0.0);
    EXPECT_EQ(l0, 380.0);
    EXPECT_NEAR(p0, 1.0 / 320.0, 1e-15);
    auto [l1, p1] = sample_hero_wavelength(0.5);
    EXPECT_EQ(l1, 540.0);
    EXPECT_NEAR(p1, 1.0 / 320.0, 1e-15);
}

TEST(HeroWavelength, UniformHistogram) {
    Pcg32 rng(11);
    const int bins = 32, n = 1000000;
    std::vector<double> obs(bins, 0), exp_counts(bins, (double)n / bins);
    for (int i = 0; i < n; ++i) {
        auto [l, p] = sample_hero_wavelength(rng.next_float());
        int b = std::min(bins - 1, (int)((l - LambdaMin) / LambdaSpan * bins));
        obs[b] += 1;
    }
    auto res = waveray_test::chi2_test(obs, exp_counts);
    EXPECT_TRUE(res.pass_99) << "chi2 = " << res.statistic << " dof " << res.dof;
}

TEST(EmissionSampling, ConstantSpectrumIsUniform) {
    EmissionSampler s(Spectrum::constant(5.0));
    auto [l, p] = s.sample(0.25);
    EXPECT_NEAR(p, 1.0 / 320.0, 1e-12);
    EXPECT_GE(l, LambdaMin);
    EXPECT_LT(l, LambdaMax);
    EXPECT_NEAR(s.pdf_integral(), 1.0, 1e-9);
}

TEST(EmissionSampling, BlackbodyHistogramMatchesPlanck) {
    // 4100 K thermal emitter
    EmissionSampler s(Spectrum::blackbody(4100));
    Pcg32 rng(3);
    const int bins = 32, n = 200000;
    std::vector<double> obs(bins, 0), want(bins, 0);
    for (int i = 0; i < n; ++i) {
        auto [l, p] = s.sample(rng.next_float());
        int b = std::min(bins - 1, (int)((l - LambdaMin) / LambdaSpan * bins));
        obs[b] += 1;
    }
    // expected histogram from the discretized density itself
    for (int cell = 0; cell < (int)LambdaSpan; ++cell) {
        Float lambda = LambdaMin + cell;
        int b = std::min(bins - 1, (int)((lambda - LambdaMin) / LambdaSpan * bins));
        want[b] += s.pdf(lambda) * n;
    }
    auto res = waveray_test::chi2_test(obs, want);
    EXPECT_TRUE(res.pass_99) << "chi2 = " << res.statistic << " dof " << res.dof;
    // shape sanity vs the raw Planck curve: red-heavy at 4100 K
    EXPECT_GT(s.pdf(690), s.pdf(420));
}

TEST(EmissionSampling, SingleCellSpikeIsDeterministic) {
    EmissionSampler s(Spectrum::tabulated({{549, 0}, {550, 10}, {551, 0}}));
    for (Float u : {0.0, 0.3, 0.999}) {
        auto [l, p] = s.sample(u);
        EXPECT_EQ(l, 550.0);
        EXPECT_NEAR(p, 1.0, 1e-12);  // all mass in one 1 nm cell
    }
}

TEST(EmissionSampling, AllZeroSpectrumThrows) {
    EXPECT_THROW(EmissionSampler(Spectrum::constant(0)), std::invalid_argument);
}

TEST(EmissionSampling, PdfIntegratesToOne) {
    EmissionSampler s(Spectrum::blackbody(6500));
    EXPECT_NEAR(s.pdf_integral(), 1.0, 1e-9);
}

TEST(SpectralToRgb, EmptyIsBlack) {
    Vec3 rgb = spectral_accumulate_to_rgb({});
    EXPECT_EQ(rgb.x, 0.0);
    EXPECT_EQ(rgb.y, 0.0);
    EXPECT_EQ(rgb.z, 0.0);
}

TEST(SpectralToRgb, EqualEnergyIsNearWhite) {
    std::vector<std::pair<Float, Float>> samples;
    const int n = 3200;
    for (int i = 0; i < n; ++i) {
        Float l = LambdaMin + (i + 0.5) * LambdaSpan / n;
        samples.push_back({l, LambdaSpan / n});  // unit spectral radiance
    }
    Vec3 xyz(0.0);
    for (auto &[l, w] : samples) xyz += cie_xyz(l) * w;
    EXPECT_NEAR(xyz.x / xyz.y, 1.0, 0.02);
    EXPECT_NEAR(xyz.z / xyz.y, 1.0, 0.02);
}

TEST(SpectralToRgb, Monochromatic550IsGreenDominant) {
    Vec3 rgb = spectral_accumulate_to_rgb({{550.0, 1.0}});
    EXPECT_GT(rgb.y, rgb.x);
    EXPECT_GT(rgb.y, rgb.z);
    EXPECT_GT(rgb.y, 0.0);
}

TEST(SpectralFiles, LoadTwoColumn) {
    std::string path = ::testing::TempDir() + "spec_test.dat";
    {
        std::ofstream out(path);
        out << "# comment line\n380 0.5\n550 1.0  # inline comment\n700 0.25\n";
    }
    Spectrum s = load_spectrum(path);
    EXPECT_NEAR(s.eval(550), 1.0, 1e-12);
    EXPECT_NEAR(s.eval(465), 0.75, 1e-12);
    EXPECT_NEAR(s.eval(900), 0.25, 1e-12) << "clamps to domain end";
}
