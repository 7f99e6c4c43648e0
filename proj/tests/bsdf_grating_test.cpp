// waveray: a spectral wave-optics path tracer
// SPDX-License-Identifier: Apache-2.0

#include <gtest/gtest.h>

#include <waveray/bsdf/grating.hpp>
#include <waveray/bsdf/lambertian.hpp>
#include <waveray/bsdf/specular.hpp>

#include "test_util.hpp"

using namespace waveray;

namespace {
GratingSurface cd_pitch_grating() {
    GratingSurface g;
    g.profile = GratingProfile::Sinusoidal;
    g.period1 = 1.6e-6;
    g.amplitude = 100e-9;
    g.base = RefractiveIndex::constant(1.5);
    return g;
}
} // namespace

TEST(GratingOrders, CdPitchAtNormalIncidence) {
    auto g = cd_pitch_grating();
    auto orders = grating_orders(g, Vec3(0, 0, 1), 550);
    // lambda/period = 0.34375: orders -2..2 propagate
    ASSERT_EQ(orders.size(), 5u);
    bool seen[5] = {};
    for (auto &o : orders) {
        ASSERT_GE(o.m1, -2);
        ASSERT_LE(o.m1, 2);
        seen[o.m1 + 2] = true;
        Float want_sin = o.m1 * 550e-9 / 1.6e-6;
        EXPECT_NEAR(o.wo.x, want_sin, 1e-12);
        EXPECT_NEAR(o.wo.y, 0.0, 1e-12);
    }
    for (bool s : seen) EXPECT_TRUE(s);
    // first order angle: asin(0.34375) = 20.1054 degrees (within the 0.01 deg gate)
    Float theta1 = rad_to_deg(std::asin(0.34375));
    EXPECT_NEAR(theta1, 20.11, 0.01);
}

TEST(GratingOrders, ZerothOrderIsExactlySpecular) {
    auto g = cd_pitch_grating();
    Vec3 wi = Vec3(0.3, -0.2, std::sqrt(1 - 0.09 - 0.04));
    auto orders = grating_orders(g, wi, 612.3);
    for (auto &o : orders)
        if (o.m1 == 0 && o.m2 == 0) {
            EXPECT_NEAR(o.wo.x, -wi.x, 1e-15);
            EXPECT_NEAR(o.wo.y, -wi.y, 1e-15);
            EXPECT_NEAR(o.wo.z, wi.z, 1e-15);
            return;
        }
    FAIL() << "zeroth order missing";
}

TEST(GratingOrders, SubWavelengthPitchKeepsOnlySpecular) {
    auto g = cd_pitch_grating();
    g.period1 = 200e-9;  // < lambda/2
    auto orders = grating_orders(g, Vec3(0, 0, 1), 550);
    ASSERT_EQ(orders.size(), 1u);
    EXPECT_EQ(orders[0].m1, 0);
    EXPECT_NEAR(orders[0].efficiency, 1.0, 1e-12);
}

TEST(GratingOrders, GratingEquationToMachinePrecision) {
    Pcg32 rng(31);
    auto g = cd_pitch_grating();
    g.orientation = 0.4;
    for (int trial = 0; trial < 200; ++trial) {
        Float z = 0.2 + 0.8 * rng.next_float();
        Float phi = TwoPi * rng.next_float();
        Float s = std::sqrt(1 - z * z);
        Vec3 wi(s * std::cos(phi), s * std::sin(phi), z);
        Float lambda = 380 + 320 * rng.next_float();
        Vec2 gdir{std::cos(g.orientation), std::sin(g.orientation)};
        for (auto &o : grating_orders(g, wi, lambda)) {
            // tangential wavevector balance, in sin-theta units
            Float rx = o.wo.x + wi.x - o.m1 * lambda * 1e-9 / g.period1 * gdir.x;
            Float ry = o.wo.y + wi.y - o.m1 * lambda * 1e-9 / g.period1 * gdir.y;
            EXPECT_LT(std::abs(rx), 1e-12);
            EXPECT_LT(std::abs(ry), 1e-12);
            EXPECT_NEAR(o.wo.norm(), 1.0, 1e-12);
        }
    }
}

TEST(GratingOrders, CountNonIncreasingInLambda) {
    auto g = cd_pitch_grating();
    std::size_t prev = SIZE_MAX;
    for (Float lambda = 380; lambda <= 700; lambda += 5) {
        auto n = grating_orders(g, Vec3(0, 0, 1), lambda).size();
        EXPECT_LE(n, prev) << "lambda " << lambda;
        prev = n;
    }
}

TEST(GratingOrders, EfficienciesSumToOneOverPropagating) {
    Pcg32 rng(5);
    for (auto profile :
         {GratingProfile::Sinusoidal, GratingProfile::Rectangular, GratingProfile::Triangular}) {
        auto g = cd_pitch_grating();
        g.profile = profile;
        g.amplitude = 180e-9;
        for (int trial = 0; trial < 20; ++trial) {
            Float z = 0.3 + 0.7 * rng.next_float();
            Float s = std::sqrt(1 - z * z);
            Vec3 wi(s, 0, z);
            auto orders = grating_orders(g, wi, 380 + 320 * rng.next_float());
            Float total = 0;
            for (auto &o : orders) total += o.efficiency;
            EXPECT_NEAR(total, 1.0, 1e-9);
        }
    }
}

TEST(GratingOrders, CrossedGratingOrderPairs) {
    auto g = cd_pitch_grating();
    g.period2 = 2.2e-6;
    auto orders = grating_orders(g, Vec3(0, 0, 1), 550);
    // both axes produce propagating orders; the (1,1) pair must exist
    bool found = false;
    for (auto &o : orders)
        if (o.m1 == 1 && o.m2 == 1) {
            found = true;
            EXPECT_NEAR(o.wo.x, 550e-9 / 1.6e-6, 1e-12);
            EXPECT_NEAR(o.wo.y, 550e-9 / 2.2e-6, 1e-12);
        }
    EXPECT_TRUE(found);
}

TEST(GratingBsdf, TwoEqualOrdersSampleFiftyFifty) {
    // binary grating at phase depth pi: zeroth order vanishes, only +-1 propagate
    GratingSurface g;
    g.profile = GratingProfile::Rectangular;
    g.period1 = 1.1e-6;
    g.amplitude = 550.0 / 4 * 1e-9;
    GratingBsdf bsdf(g);
    Vec3 wi(0, 0, 1);
    auto lobes = bsdf.delta_lobes(wi, 550);
    ASSERT_EQ(lobes.size(), 2u);
    EXPECT_NEAR(lobes[0].prob, 0.5, 1e-9);
    EXPECT_NEAR(lobes[1].prob, 0.5, 1e-9);

    Pcg32 rng(77);
    int n = 100000, plus = 0;
    for (int i = 0; i < n; ++i) {
        auto s = bsdf.sample(wi, 550, rng);
        ASSERT_TRUE(s.valid);
        ASSERT_EQ(s.lobe, LobeType::GratingOrder);
        if (s.m1 > 0) plus++;
    }
    Float sigma = std::sqrt(0.25 / n);
    EXPECT_NEAR(plus / (Float)n, 0.5, 3 * sigma);
}

TEST(GratingBsdf, PerfectMirrorLimit) {
    // conductor: a single delta-reflect lobe weighted by the Fresnel Mueller matrix
    SmoothConductorBsdf mirror(RefractiveIndex::tabulated({{380, 0.27, 2.78}, {700, 0.27, 2.78}}));
    Pcg32 rng(3);
    Vec3 wi(0.4, 0.1, std::sqrt(1 - 0.16 - 0.01));
    for (int i = 0; i < 50; ++i) {
        auto s = mirror.sample(wi, 550, rng);
        ASSERT_TRUE(s.valid);
        EXPECT_EQ(s.lobe, LobeType::DeltaReflect);
        EXPECT_NEAR(s.wo.x, -wi.x, 1e-15);
        EXPECT_NEAR(s.wo.y, -wi.y, 1e-15);
    }
    auto f = fresnel_mueller(wi.z, 1.0, complex_t(0.27, 2.78));
    auto lobes = mirror.delta_lobes(wi, 550);
    ASSERT_EQ(lobes.size(), 1u);
    for (int i = 0; i < 4; ++i)
        for (int j = 0; j < 4; ++j)
            EXPECT_NEAR(lobes[0].weight.m[i][j], f.reflect.m[i][j], 1e-12);
}

TEST(GratingBsdf, PartiallyCoherentOrderEnergyPreserved) {
    auto g = cd_pitch_grating();
    GratingBsdf bsdf(g);
    Vec3 wi(0.15, 0.05, std::sqrt(1 - 0.0225 - 0.0025));
    Float lambda = 550;
    auto lobes = bsdf.delta_lobes(wi, lambda);
    ASSERT_GE(lobes.size(), 3u);

    // bundle from a 1e-3 sr source
    auto bundle = source_distant(1e-3, lambda * 1e-9);
    Mat2 omega = blur_covariance(bundle.theta, lambda);
    Float sigma = std::sqrt(omega.a);

    for (auto &l : lobes) {
        // quadrature over a +-6 sigma angular patch around the order
        Frame f(l.wo);
        const int n = 96;
        Float span = 6 * sigma;
        Float acc = 0;
        for (int i = 0; i < n; ++i)
            for (int j = 0; j < n; ++j) {
                Float dx = (-span + 2 * span * (i + 0.5) / n);
                Float dy = (-span + 2 * span * (j + 0.5) / n);
                Vec3 w = (l.wo + f.s * dx + f.t * dy).normalized();
                if (w.z <= 0) continue;
                auto m = bsdf.eval_partially_coherent(wi, w, lambda, bundle.theta);
                // tangent-plane parameterization: dOmega = dx dy (1 + r^2)^{-3/2}
                Float jac = std::pow(1 + dx * dx + dy * dy, -1.5);
                acc += m.m[0][0] * sqr(2 * span / n) * jac;
            }
        EXPECT_NEAR(acc, l.weight.m[0][0], 1e-3 * l.weight.m[0][0] + 1e-9)
            << "order " << l.m1;
        // peak value times Gaussian normalization recovers the order efficiency
        auto peak = bsdf.eval_partially_coherent(wi, l.wo, lambda, bundle.theta);
        Float gauss_norm = TwoPi * std::sqrt(omega.det());
        EXPECT_NEAR(peak.m[0][0] * gauss_norm, l.weight.m[0][0],
                    1e-3 * l.weight.m[0][0] + 1e-12);
    }
}

TEST(GratingBsdf, CoherentLimitSharpensLobes) {
    auto g = cd_pitch_grating();
    GratingBsdf bsdf(g);
    Vec3 wi(0, 0, 1);
    Float lambda = 550;
    auto lobes = bsdf.delta_lobes(wi, lambda);
    // fixed off-lobe direction: 3 degrees from the first order
    Vec3 off = (lobes[3].wo + Vec3(0.05, 0, 0)).normalized();
    Float prev = Infinity;
    for (Float solid : {1e-2, 1e-4, 1e-6, 1e-8}) {
        auto bundle = source_distant(solid, lambda * 1e-9);
        Float v = bsdf.eval_partially_coherent(wi, off, lambda, bundle.theta).m[0][0];
        EXPECT_LE(v, prev + 1e-12);
        prev = v;
    }
    // pointwise convergence to eval_coherent = 0 away from the deltas
    EXPECT_LT(prev, 1e-9);
}

TEST(GratingBsdf, LambertianUnchangedByCoherence) {
    LambertianBsdf lam(0.7);
    Vec3 wi(0.2, 0.3, std::sqrt(1 - 0.04 - 0.09));
    Vec3 wo(-0.4, 0.1, std::sqrt(1 - 0.16 - 0.01));
    for (Float solid : {1e-6, 1e-3, 1e-1}) {
        auto bundle = source_distant(solid, 550e-9);
        auto pc = lam.eval_partially_coherent(wi, wo, 550, bundle.theta);
        auto c = lam.eval_coherent(wi, wo, 550);
        EXPECT_EQ(pc.m[0][0], c.m[0][0]);
    }
}
