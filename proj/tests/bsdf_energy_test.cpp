// waveray: a spectral wave-optics path tracer
// SPDX-License-Identifier: Apache-2.0

#include <gtest/gtest.h>

#include <memory>

#include <waveray/bsdf/grating.hpp>
#include <waveray/bsdf/harvey_shack.hpp>
#include <waveray/bsdf/lambertian.hpp>
#include <waveray/bsdf/specular.hpp>

using namespace waveray;

namespace {

// white-furnace integral: hemispherical reflectance from direction wi,
// continuous part by cosine-weighted Monte Carlo plus the delta-lobe energies
Float furnace_energy(const DiffractiveBsdf &bsdf, const Vec3 &wi, Float lambda, int n = 100000) {
    Float acc = 0;
    Pcg32 rng(hash_combine((uint64_t)(lambda * 100), (uint64_t)(wi.z * 1e6)));
    if (bsdf.has_continuous_lobe()) {
        for (int i = 0; i < n; ++i) {
            Vec3 wo = sample_cosine_hemisphere(rng.next_2d());
            Float pdf = cosine_hemisphere_pdf(wo.z);
            acc += bsdf.eval_coherent(wi, wo, lambda).m[0][0] * wo.z / pdf;
        }
        acc /= n;
    }
    for (auto &l : bsdf.delta_lobes(wi, lambda)) acc += l.weight.m[0][0];
    return acc;
}

std::vector<std::pair<std::string, std::shared_ptr<DiffractiveBsdf>>> material_catalog() {
    std::vector<std::pair<std::string, std::shared_ptr<DiffractiveBsdf>>> out;
    out.push_back({"lambertian", std::make_shared<LambertianBsdf>(1.0)});

    GratingSurface g;
    g.profile = GratingProfile::Sinusoidal;
    g.period1 = 1.6e-6;
    g.amplitude = 150e-9;
    g.base = RefractiveIndex::tabulated({{380, 0.25, 2.3}, {550, 0.27, 2.78}, {700, 0.3, 3.1}});
    out.push_back({"grating", std::make_shared<GratingBsdf>(g)});

    HarveyShackSurface hs;
    hs.sigma_h = 60e-9;
    hs.correlation_length = 1.5e-6;
    hs.falloff_exponent = 2.5;
    hs.base = RefractiveIndex::constant(1.6);
    out.push_back({"harvey-shack", std::make_shared<HarveyShackBsdf>(hs)});

    MultilayerStack stack;
    stack.layers.push_back({100e-9, RefractiveIndex::constant(1.38)});
    stack.layers.push_back({80e-9, RefractiveIndex::constant(2.3)});
    stack.substrate = RefractiveIndex::constant(1.52);
    out.push_back({"multilayer", std::make_shared<MultilayerBsdf>(stack)});
    return out;
}

Vec3 incidence(Float deg) {
    Float t = deg_to_rad(deg);
    return {std::sin(t), 0, std::cos(t)};
}

} // namespace

TEST(Energy, WhiteFurnaceAllFamilies) {
    for (auto &[name, bsdf] : material_catalog())
        for (Float lambda : {450.0, 550.0, 650.0})
            for (Float deg : {0.0, 11.0, 23.0, 34.0, 45.0, 56.0, 67.0, 78.0}) {
                Float e = furnace_energy(*bsdf, incidence(deg), lambda);
                EXPECT_LE(e, 1.0 + 1e-2) << name << " lambda " << lambda << " deg " << deg;
                EXPECT_GE(e, 0.0);
            }
}

TEST(Energy, ReciprocityNonDeltaModels) {
    Pcg32 rng(7);
    for (auto &[name, bsdf] : material_catalog()) {
        if (!bsdf->has_continuous_lobe()) continue;
        for (int trial = 0; trial < 50; ++trial) {
            Float z1 = 0.05 + 0.95 * rng.next_float(), p1 = TwoPi * rng.next_float();
            Float z2 = 0.05 + 0.95 * rng.next_float(), p2 = TwoPi * rng.next_float();
            Vec3 a{std::sqrt(1 - z1 * z1) * std::cos(p1), std::sqrt(1 - z1 * z1) * std::sin(p1), z1};
            Vec3 b{std::sqrt(1 - z2 * z2) * std::cos(p2), std::sqrt(1 - z2 * z2) * std::sin(p2), z2};
            Float f_ab = bsdf->eval_coherent(a, b, 550).m[0][0];
            Float f_ba = bsdf->eval_coherent(b, a, 550).m[0][0];
            EXPECT_NEAR(f_ab, f_ba, 1e-6 * std::max(f_ab, f_ba) + 1e-15) << name;
        }
    }
}

TEST(Energy, StokesValidityThroughEveryMaterial) {
    Pcg32 rng(19);
    for (auto &[name, bsdf] : material_catalog()) {
        for (int trial = 0; trial < 300; ++trial) {
            Float z = 0.1 + 0.9 * rng.next_float();
            Vec3 wi{std::sqrt(1 - z * z), 0, z};
            // random valid stokes input
            Float s0 = 1 + rng.next_float();
            Float dop = rng.next_float();
            Float zz = 2 * rng.next_float() - 1;
            Float ph = TwoPi * rng.next_float();
            Float rr = std::sqrt(1 - zz * zz);
            StokesVector in{s0, s0 * dop * rr * std::cos(ph), s0 * dop * rr * std::sin(ph),
                            s0 * dop * zz};
            ASSERT_TRUE(in.valid());
            if (bsdf->has_continuous_lobe()) {
                Vec3 wo = sample_cosine_hemisphere(rng.next_2d());
                StokesVector out = bsdf->eval_coherent(wi, wo, 550) * in;
                EXPECT_TRUE(out.valid(1e-9)) << name;
            }
            for (auto &l : bsdf->delta_lobes(wi, 550)) {
                StokesVector out = l.weight * in;
                EXPECT_TRUE(out.valid(1e-9)) << name;
            }
        }
    }
}

TEST(Energy, PartiallyCoherentApproachesCoherent) {
    // on a sequence of increasingly coherent bundles, the PC value converges to
    // the coherent value away from delta directions
    HarveyShackSurface hs;
    hs.sigma_h = 80e-9;
    hs.correlation_length = 1e-6;
    hs.falloff_exponent = 3.0;
    HarveyShackBsdf bsdf(hs);
    Vec3 wi = incidence(30);
    Vec3 wo = incidence(52);  // away from the specular direction
    wo.x = -wo.x;
    wo = (wo + Vec3(0.2, 0.35, 0)).normalized();
    Float coherent = bsdf.eval_coherent(wi, wo, 550).m[0][0];
    ASSERT_GT(coherent, 0);
    Float prev_err = Infinity;
    for (Float solid : {1e-2, 1e-4, 1e-6, 1e-8}) {
        auto bundle = source_distant(solid, 550e-9);
        Float pc = bsdf.eval_partially_coherent(wi, wo, 550, bundle.theta).m[0][0];
        Float err = std::abs(pc - coherent) / coherent;
        EXPECT_LE(err, prev_err + 1e-9);
        prev_err = err;
    }
    EXPECT_LT(prev_err, 1e-4);
}

TEST(Energy, DielectricLobeProbabilitiesSumToOne) {
    SmoothDielectricBsdf glass(RefractiveIndex::cauchy(1.5, 0.005));
    Pcg32 rng(3);
    for (int trial = 0; trial < 100; ++trial) {
        Float z = 0.02 + 0.98 * rng.next_float();
        Vec3 wi{std::sqrt(1 - z * z), 0, (rng.next_float() < 0.5 ? z : -z)};
        auto lobes = glass.delta_lobes(wi, 550);
        Float total = 0;
        for (auto &l : lobes) total += l.prob;
        ASSERT_FALSE(lobes.empty());
        EXPECT_NEAR(total, 1.0, 1e-12);
        // refraction flags dispersion for the secondaries-drop rule
        for (auto &l : lobes)
            if (l.type == LobeType::DeltaRefract) EXPECT_TRUE(l.dispersive);
    }
}

TEST(Energy, GaussHermiteFallbackMatchesWideLobeLimit) {
    // for a bundle much narrower than the lobe, the quadrature is a no-op
    LambertianBsdf lam(0.6);
    auto bundle = source_distant(1e-8, 550e-9);
    Vec3 wi = incidence(20), wo = incidence(40);
    Float pc = lam.eval_partially_coherent(wi, wo, 550, bundle.theta).m[0][0];
    EXPECT_NEAR(pc, 0.6 * InvPi, 1e-9);
}
