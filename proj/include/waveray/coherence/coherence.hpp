// waveray: a spectral wave-optics path tracer
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <stdexcept>

#include "../core/math.hpp"

namespace waveray {

/// 2x2 SPD angular covariance of the generalized rays about the bundle axis [rad^2].
struct DiffusivityMatrix {
    Mat2 omega;

    DiffusivityMatrix() = default;
    explicit DiffusivityMatrix(const Mat2 &m) : omega(m) { assert(m.is_spd()); }

    /// Solid-angle measure: sqrt of the determinant.
    Float solid_angle_measure() const { return std::sqrt(omega.det()); }
};

/// 2x2 SPD transverse coherence-area tensor [m^2].
struct CoherenceShapeMatrix {
    Mat2 theta;

    CoherenceShapeMatrix() = default;
    explicit CoherenceShapeMatrix(const Mat2 &m) : theta(m) { assert(m.is_spd()); }

    /// Coherence area = sqrt(det Theta); the linear coherence scale is its sqrt.
    Float coherence_area() const { return std::sqrt(theta.det()); }
};

/// Theta = lambda^2 Omega^{-1} (lambda in meters).
inline CoherenceShapeMatrix coherence_from_diffusivity(const DiffusivityMatrix &d,
                                                       Float lambda_m) {
    assert(lambda_m > 0);
    if (d.omega.det() <= 0)
        throw std::invalid_argument("coherence_from_diffusivity: singular diffusivity");
    return CoherenceShapeMatrix(d.omega.inverse() * (lambda_m * lambda_m));
}

inline DiffusivityMatrix diffusivity_from_coherence(const CoherenceShapeMatrix &c,
                                                    Float lambda_m) {
    if (c.theta.det() <= 0)
        throw std::invalid_argument("diffusivity_from_coherence: singular shape matrix");
    return DiffusivityMatrix(c.theta.inverse() * (lambda_m * lambda_m));
}

/// Coherence state of the solve-stage ray bundle. One shape matrix serves the
/// entire bundle; there is no per-polarization state.
struct BundleState {
    enum class Source { Distant, Area };

    Source source = Source::Distant;
    Float lambda_m = 550e-9;
    Float path_distance = 0;   // total propagation distance from the source [m]
    Float source_area = 0;     // emitting patch area a [m^2] (area sources)
    Float first_distance = 0;  // r1, source to first interaction [m]
    DiffusivityMatrix omega;   // current angular diffusivity
    CoherenceShapeMatrix theta;

    /// Re-derive Theta from the current diffusivity.
    void refresh_theta() { theta = coherence_from_diffusivity(omega, lambda_m); }
};

/// Distant source subtending `solid_angle` [sr]. The scalar solid angle splits
/// isotropically as Omega = (solid_angle / 2) I so sqrt(det) = solid_angle / 2.
inline BundleState source_distant(Float solid_angle, Float lambda_m) {
    if (solid_angle <= 0)
        throw std::invalid_argument("source_distant: zero solid angle (delta sources disallowed)");
    BundleState b;
    b.source = BundleState::Source::Distant;
    b.lambda_m = lambda_m;
    b.omega = DiffusivityMatrix(Mat2::isotropic(solid_angle / 2));
    b.refresh_theta();
    return b;
}

/// Area source: patch of area `a` observed from distance r1. The subtended solid
/// angle a/r^2 splits isotropically; coherence then grows as r^2 on propagation.
inline BundleState source_area(Float a, Float r1, Float lambda_m) {
    if (a <= 0 || r1 <= 0) throw std::invalid_argument("source_area: a and r1 must be positive");
    BundleState b;
    b.source = BundleState::Source::Area;
    b.lambda_m = lambda_m;
    b.source_area = a;
    b.first_distance = r1;
    b.path_distance = r1;
    b.omega = DiffusivityMatrix(Mat2::isotropic(a / (r1 * r1) / 2));
    b.refresh_theta();
    return b;
}

/// Free propagation over delta_r. Distant sources keep their shape matrix; area
/// sources rescale it by ((r + delta_r)/r)^2.
inline BundleState propagate_distance(const BundleState &b, Float delta_r) {
    assert(delta_r >= 0);
    BundleState out = b;
    out.path_distance += delta_r;
    if (b.source == BundleState::Source::Area && delta_r > 0) {
        Float ratio = out.path_distance / b.path_distance;
        out.omega = DiffusivityMatrix(b.omega.omega * (1 / (ratio * ratio)));
        out.refresh_theta();
    }
    return out;
}

struct InteractionKind {
    enum class Type { SpecularReflect, SpecularRefract, Diffractive };
    Type type = Type::SpecularReflect;
    Float eta_ratio = 1;      // refract: eta_t / eta_i
    Float cos_i = 1, cos_t = 1;
    Mat2 sigma;               // diffractive: lobe angular covariance [rad^2]
    Float frame_rotation = 0; // rotation of the transverse frame about the axis

    static InteractionKind specular_reflect(Float frame_rotation = 0) {
        InteractionKind k;
        k.type = Type::SpecularReflect;
        k.frame_rotation = frame_rotation;
        return k;
    }
    static InteractionKind specular_refract(Float eta_ratio, Float cos_i, Float cos_t,
                                            Float frame_rotation = 0) {
        InteractionKind k;
        k.type = Type::SpecularRefract;
        k.eta_ratio = eta_ratio;
        k.cos_i = cos_i;
        k.cos_t = cos_t;
        k.frame_rotation = frame_rotation;
        return k;
    }
    static InteractionKind diffractive(const Mat2 &sigma, Float frame_rotation = 0) {
        InteractionKind k;
        k.type = Type::Diffractive;
        k.sigma = sigma;
        k.frame_rotation = frame_rotation;
        return k;
    }
};

/// Transform the bundle's diffusivity at an interaction; Theta is re-derived.
/// Specular reflection rotates the tensor frame (area-preserving). Refraction
/// applies the linearized Snell Jacobian to the angular covariance: in-plane
/// variance scales by (cos_i / (eta cos_t))^2, out-of-plane by 1/eta^2.
/// Diffractive interactions add the lobe covariance: Omega' = Omega + Sigma.
inline BundleState transform_at_interaction(const BundleState &b, const InteractionKind &kind) {
    BundleState out = b;
    Mat2 omega = b.omega.omega;
    if (kind.frame_rotation != 0) omega = omega.rotated(kind.frame_rotation);

    switch (kind.type) {
        case InteractionKind::Type::SpecularReflect:
            break;
        case InteractionKind::Type::SpecularRefract: {
            assert(kind.cos_t > 0 && kind.cos_i > 0 && kind.eta_ratio > 0);
            Float j_plane = kind.cos_i / (kind.eta_ratio * kind.cos_t);
            Float j_perp = 1 / kind.eta_ratio;
            // x = plane of incidence, y = perpendicular (in the rotated frame)
            omega = Mat2{omega.a * j_plane * j_plane, omega.b * j_plane * j_perp,
                         omega.c * j_perp * j_perp};
            break;
        }
        case InteractionKind::Type::Diffractive: {
            assert(kind.sigma.is_spd(0) || kind.sigma.det() >= 0);
            omega = omega + kind.sigma;
            break;
        }
    }
    out.omega = DiffusivityMatrix(omega);
    out.refresh_theta();
    return out;
}

} // namespace waveray
