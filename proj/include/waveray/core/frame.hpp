// waveray: a spectral wave-optics path tracer
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include "math.hpp"

namespace waveray {

/// Orthonormal tangent frame (s, t, n).
struct Frame {
    Vec3 s, t, n;

    Frame() : s(1, 0, 0), t(0, 1, 0), n(0, 0, 1) {}
    Frame(const Vec3 &s, const Vec3 &t, const Vec3 &n) : s(s), t(t), n(n) {}

    /// Duff et al. branchless construction from a unit normal.
    explicit Frame(const Vec3 &normal) : n(normal) {
        Float sign = std::copysign(1.0, n.z);
        Float a = -1.0 / (sign + n.z);
        Float b = n.x * n.y * a;
        s = Vec3(1.0 + sign * n.x * n.x * a, sign * b, -sign * n.x);
        t = Vec3(b, sign + n.y * n.y * a, -n.y);
    }

    Vec3 to_local(const Vec3 &v) const { return {v.dot(s), v.dot(t), v.dot(n)}; }
    Vec3 to_world(const Vec3 &v) const { return s * v.x + t * v.y + n * v.z; }

    static Float cos_theta(const Vec3 &v_local) { return v_local.z; }
    static Float sin_theta2(const Vec3 &v_local) {
        return std::max(Float(0), 1 - v_local.z * v_local.z);
    }

    bool orthonormal(Float tol = 1e-6) const {
        return std::abs(s.norm() - 1) < tol && std::abs(t.norm() - 1) < tol &&
               std::abs(n.norm() - 1) < tol && std::abs(s.dot(t)) < tol &&
               std::abs(s.dot(n)) < tol && std::abs(t.dot(n)) < tol;
    }
};

inline Vec3 reflect(const Vec3 &w, const Vec3 &n) {
    return 2.0 * w.dot(n) * n - w;
}

/// Refract incident direction w (pointing away from surface) about n;
/// eta = n_inside / n_outside relative to the side w is on. Returns false on TIR.
inline bool refract(const Vec3 &w, const Vec3 &n, Float eta, Vec3 *wt) {
    Float cos_i = w.dot(n);
    Float sin2_t = (1 - cos_i * cos_i) / (eta * eta);
    if (sin2_t >= 1) return false;
    Float cos_t = std::sqrt(1 - sin2_t);
    *wt = -w / eta + (cos_i / eta - cos_t) * n;
    return true;
}

// Cosine-weighted hemisphere sample about +z; pdf = cos_theta / pi.
inline Vec3 sample_cosine_hemisphere(const Vec2 &u) {
    Float r = std::sqrt(u.x);
    Float phi = TwoPi * u.y;
    Float z = std::sqrt(std::max(Float(0), 1 - u.x));
    return {r * std::cos(phi), r * std::sin(phi), z};
}

inline Float cosine_hemisphere_pdf(Float cos_theta) {
    return cos_theta > 0 ? cos_theta * InvPi : 0;
}

// Uniform direction within a cone of solid angle `omega` about +z.
inline Vec3 sample_uniform_cone(const Vec2 &u, Float omega) {
    Float cos_max = 1 - omega / TwoPi;
    Float cos_t = 1 - u.x * (1 - cos_max);
    Float sin_t = safe_sqrt(1 - cos_t * cos_t);
    Float phi = TwoPi * u.y;
    return {sin_t * std::cos(phi), sin_t * std::sin(phi), cos_t};
}

inline Float uniform_cone_pdf(Float omega) { return omega > 0 ? 1 / omega : 0; }

} // namespace waveray
