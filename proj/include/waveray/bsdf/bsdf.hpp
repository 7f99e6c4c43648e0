// waveray: a spectral wave-optics path tracer
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <memory>
#include <vector>

#include "../coherence/coherence.hpp"
#include "../core/frame.hpp"
#include "../core/rng.hpp"
#include "../optics/mueller.hpp"

namespace waveray {

enum class LobeType { DeltaReflect, DeltaRefract, GratingOrder, Diffuse, Glossy };

inline bool is_delta(LobeType t) {
    return t == LobeType::DeltaReflect || t == LobeType::DeltaRefract ||
           t == LobeType::GratingOrder;
}

/// One delta lobe reachable from a given incident direction.
struct DeltaLobe {
    Vec3 wo;               // outgoing direction, local frame
    MuellerMatrix weight;  // radiance throughput operator in s/p frames
    Float prob = 0;        // discrete selection probability under sample()
    LobeType type = LobeType::DeltaReflect;
    int m1 = 0, m2 = 0;    // grating order indices
    bool dispersive = false;
    Float eta_ratio = 1;   // relative index for refraction lobes
};

/// Result of importance-sampling a material.
struct DirectionSample {
    Vec3 wo;
    Float pdf = 0;          // solid-angle density; 0 for delta lobes
    Float lobe_prob = 0;    // discrete probability of the chosen lobe
    MuellerMatrix weight;   // f cos/pdf for continuous lobes, throughput for delta
    LobeType lobe = LobeType::Diffuse;
    int m1 = 0, m2 = 0;
    bool dispersive_delta = false;
    Float eta_ratio = 1;
    bool valid = false;
};

/// All directions below are unit vectors in the local shading frame (+z = normal),
/// pointing away from the surface. `wi` faces the viewer side of the transport,
/// `wo` the light side; Mueller matrices map Stokes arriving from wo onto wi.
class DiffractiveBsdf {
public:
    virtual ~DiffractiveBsdf() = default;

    /// Continuous (non-delta) coherent value, 1/sr. Delta lobes never appear here.
    virtual MuellerMatrix eval_coherent(const Vec3 &wi, const Vec3 &wo, Float lambda_nm) const = 0;

    /// Exact solid-angle density of sample() restricted to non-delta lobes.
    virtual Float pdf(const Vec3 &wi, const Vec3 &wo, Float lambda_nm) const = 0;

    virtual DirectionSample sample(const Vec3 &wi, Float lambda_nm, Pcg32 &rng) const = 0;

    /// Delta lobes reachable from wi, with their sample() selection probabilities.
    virtual std::vector<DeltaLobe> delta_lobes(const Vec3 &wi, Float lambda_nm) const {
        (void)wi; (void)lambda_nm;
        return {};
    }

    /// Partially-coherent value: the coherent BSDF convolved with the bundle's
    /// angular density. Delta lobes become Gaussian lobes with covariance
    /// Omega_blur = lambda^2 Theta^{-1}; smooth lobes fall back to Gauss-Hermite
    /// quadrature over incident-direction perturbations.
    virtual MuellerMatrix eval_partially_coherent(const Vec3 &wi, const Vec3 &wo,
                                                  Float lambda_nm,
                                                  const CoherenceShapeMatrix &theta) const;

    /// Angular covariance the material adds to a bundle's diffusivity when the
    /// given lobe is taken (the Sigma of the coherence transform).
    virtual Mat2 lobe_angular_covariance(LobeType lobe) const {
        return lobe == LobeType::Diffuse ? Mat2::isotropic(1.0) : Mat2::isotropic(0.0);
    }

    virtual bool has_continuous_lobe() const { return true; }
};

/// Shared sampler for materials whose energy lives entirely in delta lobes.
inline DirectionSample sample_delta_only(const DiffractiveBsdf &b, const Vec3 &wi,
                                         Float lambda_nm, Pcg32 &rng) {
    DirectionSample s;
    auto lobes = b.delta_lobes(wi, lambda_nm);
    if (lobes.empty()) return s;
    Float u = rng.next_float();
    Float acc = 0;
    for (auto &l : lobes) {
        acc += l.prob;
        if (u < acc || &l == &lobes.back()) {
            s.wo = l.wo;
            s.pdf = 0;
            s.lobe_prob = l.prob;
            s.lobe = l.type;
            s.m1 = l.m1;
            s.m2 = l.m2;
            s.weight = l.weight * (l.prob > 0 ? 1 / l.prob : 0);
            s.dispersive_delta = l.dispersive && l.type == LobeType::DeltaRefract;
            s.eta_ratio = l.eta_ratio;
            s.valid = l.prob > 0;
            return s;
        }
    }
    return s;
}

/// Blur covariance of a bundle at wavelength lambda.
inline Mat2 blur_covariance(const CoherenceShapeMatrix &theta, Float lambda_nm) {
    if (theta.theta.det() <= 0)
        throw std::invalid_argument("blur covariance: singular shape matrix");
    Float l_m = lambda_nm * 1e-9;
    return theta.theta.inverse() * (l_m * l_m);
}

/// Angular 2-D Gaussian lobe density per steradian. The deviation lives in the
/// lobe axis' tangent plane (sine space), where the Gaussian normalizes to one;
/// d(dev) = cos dOmega, so the cos factor makes the lobe integrate to one over
/// directions.
inline Float gaussian_lobe_density(const Vec2 &dev, const Mat2 &omega) {
    Float det = omega.det();
    if (det <= 0) return 0;
    Float d2 = dev.norm2();
    if (d2 >= 1) return 0;
    Mat2 inv = omega.inverse();
    Float q = dev.x * (inv.a * dev.x + inv.b * dev.y) + dev.y * (inv.b * dev.x + inv.c * dev.y);
    return std::exp(-0.5 * q) * std::sqrt(1 - d2) / (TwoPi * std::sqrt(det));
}

/// Angular deviation of w from the lobe axis, as a 2-vector in the axis frame.
inline Vec2 angular_deviation(const Vec3 &w, const Vec3 &axis) {
    Frame f(axis);
    Vec3 local = f.to_local(w);
    // small-angle parameterization; exact at the axis
    return {local.x, local.y};
}

namespace detail {
// 5-point Gauss-Hermite rule for weight exp(-x^2), rescaled to N(0,1) use.
inline constexpr Float GhNodes[5] = {-2.0201828704560856, -0.9585724646138185, 0.0,
                                     0.9585724646138185, 2.0201828704560856};
inline constexpr Float GhWeights[5] = {0.019953242059045913, 0.39361932315224116,
                                       0.9453087204829419, 0.39361932315224116,
                                       0.019953242059045913};
} // namespace detail

inline MuellerMatrix DiffractiveBsdf::eval_partially_coherent(
    const Vec3 &wi, const Vec3 &wo, Float lambda_nm, const CoherenceShapeMatrix &theta) const {
    // Generic fallback: average the coherent BSDF over incident-direction
    // perturbations distributed with the bundle's angular covariance.
    Mat2 omega = blur_covariance(theta, lambda_nm);
    if (!has_continuous_lobe()) return MuellerMatrix::zero();
    // principal axes of the blur
    Float s1 = std::sqrt(std::max(omega.eig_max(), Float(0)));
    Float s2 = std::sqrt(std::max(omega.eig_min(), Float(0)));
    if (s1 <= 0) return eval_coherent(wi, wo, lambda_nm);
    Float phi = 0.5 * std::atan2(2 * omega.b, omega.a - omega.c);
    Frame f(wo);
    Vec3 a1 = f.s * std::cos(phi) + f.t * std::sin(phi);
    Vec3 a2 = f.t * std::cos(phi) - f.s * std::sin(phi);

    MuellerMatrix acc;
    Float wsum = 0;
    const Float norm = std::sqrt(2.0);
    for (int i = 0; i < 5; ++i)
        for (int j = 0; j < 5; ++j) {
            Float d1 = detail::GhNodes[i] * norm * s1;
            Float d2 = detail::GhNodes[j] * norm * s2;
            Vec3 w = (wo + a1 * d1 + a2 * d2);
            Float n = w.norm();
            if (n <= 0) continue;
            w = w / n;
            if (w.z <= 0) continue;  // perturbed below the horizon: no transport
            Float wt = detail::GhWeights[i] * detail::GhWeights[j];
            acc += eval_coherent(wi, w, lambda_nm) * wt;
            wsum += wt;
        }
    if (wsum <= 0) return MuellerMatrix::zero();
    return acc * (1 / wsum);
}

} // namespace waveray
