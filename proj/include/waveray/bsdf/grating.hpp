// waveray: a spectral wave-optics path tracer
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cmath>

#include "../optics/ior.hpp"
#include "bsdf.hpp"

namespace waveray {

enum class GratingProfile { Sinusoidal, Rectangular, Triangular };

/// A reflective diffraction grating ruled into a dielectric or conductive base.
/// One period for ruled (1-D) gratings, two for crossed (2-D) gratings.
struct GratingSurface {
    GratingProfile profile = GratingProfile::Sinusoidal;
    Float period1 = 1.6e-6;   // m
    Float period2 = 0;        // m; 0 means a 1-D grating
    Float amplitude = 100e-9; // peak surface height h, m
    Float orientation = 0;    // tangent-frame angle of the grating vector
    RefractiveIndex base = RefractiveIndex::constant(1.5);
};

struct GratingOrder {
    int m1 = 0, m2 = 0;
    Vec3 wo;            // outgoing direction for incidence along -w
    Float efficiency;   // e_m, renormalized over propagating orders
};

namespace detail {

/// J_0..J_n at a fixed argument by Miller's downward recurrence (normalized
/// with J_0 + 2 sum J_2k = 1); one pass replaces per-order Bessel calls.
inline void bessel_j_all(Float x, int n, Float *out) {
    if (x == 0) {
        out[0] = 1;
        for (int m = 1; m <= n; ++m) out[m] = 0;
        return;
    }
    int start = n + 14 + (int)std::ceil(std::abs(x));
    Float jp = 0, j = 1e-30, norm = 0;
    for (int m = start; m >= 0; --m) {
        Float jm = (2.0 * (m + 1) / x) * j - jp;
        jp = j;
        j = jm;
        if (m <= n) out[m] = j;
        if (m > 0 && m % 2 == 0) norm += 2 * j;
        // rescale to avoid overflow of the unnormalized recurrence
        if (std::abs(j) > 1e20) {
            j *= 1e-20;
            jp *= 1e-20;
            norm *= 1e-20;
            for (int k = std::max(0, m); k <= n; ++k) out[k] *= 1e-20;
        }
    }
    norm += j;  // j now holds the unnormalized J_0
    for (int m = 0; m <= n; ++m) out[m] /= norm;
}

/// Scalar Fraunhofer order amplitudes-squared for phase depth delta = 2 k h cos.
/// `bessel` must hold J_0..J_|m| of delta when the profile is sinusoidal.
inline Float profile_order_energy(GratingProfile profile, int m, Float delta,
                                  const Float *bessel) {
    switch (profile) {
        case GratingProfile::Sinusoidal:
            // orders beyond the table are deep in the Bessel decay tail
            if (std::abs(m) > 63) return 0;
            return sqr(bessel[std::abs(m)]);
        case GratingProfile::Rectangular: {
            // 50% duty binary grating with phase step delta
            if (m == 0) return sqr(std::cos(delta / 2));
            if (m % 2 == 0) return 0;
            return sqr(2 / (Pi * (Float)m) * std::sin(delta / 2));
        }
        case GratingProfile::Triangular: {
            // blazed ramp: shifted-sinc^2 envelope peaking at the blaze order
            Float a = (Float)m - delta / TwoPi;
            if (std::abs(a) < 1e-12) return 1;
            return sqr(std::sin(Pi * a) / (Pi * a));
        }
    }
    return 0;
}

} // namespace detail

/// All propagating orders for light exchanged with direction w (local frame).
/// Order directions satisfy wo_xy = -w_xy + (m1 lambda/P1) g1 + (m2 lambda/P2) g2.
inline std::vector<GratingOrder> grating_orders(const GratingSurface &g, const Vec3 &w,
                                                Float lambda_nm) {
    std::vector<GratingOrder> orders;
    if (std::abs(w.z) <= 0) return orders;
    orders.reserve(16);
    const Float lambda_m = lambda_nm * 1e-9;
    const Vec2 g1{std::cos(g.orientation), std::sin(g.orientation)};
    const Vec2 g2{-g1.y, g1.x};
    const Float step1 = lambda_m / g.period1;
    const Float step2 = g.period2 > 0 ? lambda_m / g.period2 : 0;
    const int max1 = (int)std::ceil(2 / step1) + 1;
    const int max2 = g.period2 > 0 ? (int)std::ceil(2 / step2) + 1 : 0;

    const Float delta = 2 * TwoPi / lambda_m * g.amplitude * std::abs(w.z);
    const Vec2 base_xy{-w.x, -w.y};

    Float bessel_table[64];
    if (g.profile == GratingProfile::Sinusoidal)
        detail::bessel_j_all(delta, std::min(63, std::max(max1, max2)), bessel_table);

    Float total = 0;
    for (int m1 = -max1; m1 <= max1; ++m1) {
        Float e1 = detail::profile_order_energy(g.profile, m1, delta, bessel_table);
        if (e1 <= 0) continue;
        for (int m2 = -max2; m2 <= max2; ++m2) {
            Float e2 = g.period2 > 0
                           ? detail::profile_order_energy(g.profile, m2, delta, bessel_table)
                           : 1;
            if (e2 <= 0) continue;
            Vec2 xy = base_xy + g1 * ((Float)m1 * step1) + g2 * ((Float)m2 * step2);
            Float s2 = xy.norm2();
            if (s2 >= 1 - 1e-12) continue;  // evanescent order: culled
            GratingOrder o;
            o.m1 = m1;
            o.m2 = m2;
            o.wo = Vec3(xy.x, xy.y, std::sqrt(1 - s2));
            o.efficiency = e1 * e2;
            total += o.efficiency;
            orders.push_back(o);
        }
    }
    if (total <= 0) {
        orders.clear();
        return orders;
    }
    // cull numerically-extinct orders (e.g. the zeroth order of a binary grating
    // at phase depth exactly pi)
    Float cull = 1e-12 * total;
    std::erase_if(orders, [&](const GratingOrder &o) { return o.efficiency < cull; });
    total = 0;
    for (auto &o : orders) total += o.efficiency;
    for (auto &o : orders) o.efficiency /= total;  // sum over propagating orders = 1
    return orders;
}

class GratingBsdf final : public DiffractiveBsdf {
public:
    explicit GratingBsdf(GratingSurface surface) : m_surface(std::move(surface)) {}

    MuellerMatrix eval_coherent(const Vec3 &, const Vec3 &, Float) const override {
        return MuellerMatrix::zero();  // all energy lives in the delta orders
    }
    Float pdf(const Vec3 &, const Vec3 &, Float) const override { return 0; }
    bool has_continuous_lobe() const override { return false; }

    std::vector<DeltaLobe> delta_lobes(const Vec3 &wi, Float lambda_nm) const override {
        std::vector<DeltaLobe> lobes;
        if (wi.z <= 0) return lobes;
        auto orders = grating_orders(m_surface, wi, lambda_nm);
        if (orders.empty()) return lobes;
        lobes.reserve(orders.size());
        auto fresnel = fresnel_mueller(wi.z, 1.0, m_surface.base.eval(lambda_nm));
        for (auto &o : orders) {
            DeltaLobe l;
            l.wo = o.wo;
            l.weight = fresnel.reflect * o.efficiency;
            l.prob = o.efficiency;  // reflectance factor is common to all orders
            l.type = LobeType::GratingOrder;
            l.m1 = o.m1;
            l.m2 = o.m2;
            lobes.push_back(l);
        }
        return lobes;
    }

    DirectionSample sample(const Vec3 &wi, Float lambda_nm, Pcg32 &rng) const override {
        return sample_delta_only(*this, wi, lambda_nm, rng);
    }

    /// Each delta order becomes a Gaussian angular lobe with the bundle's blur
    /// covariance; per-order energy is preserved.
    MuellerMatrix eval_partially_coherent(const Vec3 &wi, const Vec3 &wo, Float lambda_nm,
                                          const CoherenceShapeMatrix &theta) const override {
        Mat2 omega = blur_covariance(theta, lambda_nm);
        MuellerMatrix acc;
        for (auto &l : delta_lobes(wi, lambda_nm)) {
            Vec2 dev = angular_deviation(wo, l.wo);
            Float g = gaussian_lobe_density(dev, omega);
            if (g > 0) acc += l.weight * g;
        }
        return acc;
    }

    Mat2 lobe_angular_covariance(LobeType) const override { return Mat2::isotropic(0.0); }

    const GratingSurface &surface() const { return m_surface; }

private:
    GratingSurface m_surface;
};

} // namespace waveray
