// waveray: a spectral wave-optics path tracer
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <algorithm>
#include <cassert>
#include <cmath>
#include <complex>
#include <limits>
#include <ostream>

namespace waveray {

using Float = double;
using complex_t = std::complex<double>;

constexpr Float Pi = 3.14159265358979323846;
constexpr Float TwoPi = 2.0 * Pi;
constexpr Float InvPi = 1.0 / Pi;
constexpr Float Infinity = std::numeric_limits<Float>::infinity();
constexpr Float RayEpsilon = 1e-4;

template <typename T> T sqr(T x) { return x * x; }

inline Float clamp(Float x, Float lo, Float hi) { return std::min(std::max(x, lo), hi); }

inline Float deg_to_rad(Float d) { return d * Pi / 180.0; }
inline Float rad_to_deg(Float r) { return r * 180.0 / Pi; }

inline Float safe_sqrt(Float x) { return std::sqrt(std::max(Float(0), x)); }

struct Vec2 {
    Float x = 0, y = 0;

    Vec2() = default;
    Vec2(Float x, Float y) : x(x), y(y) {}

    Vec2 operator+(const Vec2 &o) const { return {x + o.x, y + o.y}; }
    Vec2 operator-(const Vec2 &o) const { return {x - o.x, y - o.y}; }
    Vec2 operator*(Float s) const { return {x * s, y * s}; }
    Vec2 operator/(Float s) const { return {x / s, y / s}; }
    Vec2 operator-() const { return {-x, -y}; }

    Float dot(const Vec2 &o) const { return x * o.x + y * o.y; }
    Float norm2() const { return x * x + y * y; }
    Float norm() const { return std::sqrt(norm2()); }
};

inline Vec2 operator*(Float s, const Vec2 &v) { return v * s; }

struct Vec3 {
    Float x = 0, y = 0, z = 0;

    Vec3() = default;
    Vec3(Float x, Float y, Float z) : x(x), y(y), z(z) {}
    explicit Vec3(Float v) : x(v), y(v), z(v) {}

    Vec3 operator+(const Vec3 &o) const { return {x + o.x, y + o.y, z + o.z}; }
    Vec3 operator-(const Vec3 &o) const { return {x - o.x, y - o.y, z - o.z}; }
    Vec3 operator*(Float s) const { return {x * s, y * s, z * s}; }
    Vec3 operator*(const Vec3 &o) const { return {x * o.x, y * o.y, z * o.z}; }
    Vec3 operator/(Float s) const { return {x / s, y / s, z / s}; }
    Vec3 operator-() const { return {-x, -y, -z}; }
    Vec3 &operator+=(const Vec3 &o) { x += o.x; y += o.y; z += o.z; return *this; }
    Vec3 &operator*=(Float s) { x *= s; y *= s; z *= s; return *this; }

    Float operator[](int i) const { return i == 0 ? x : (i == 1 ? y : z); }
    Float &operator[](int i) { return i == 0 ? x : (i == 1 ? y : z); }

    Float dot(const Vec3 &o) const { return x * o.x + y * o.y + z * o.z; }
    Vec3 cross(const Vec3 &o) const {
        return {y * o.z - z * o.y, z * o.x - x * o.z, x * o.y - y * o.x};
    }
    Float norm2() const { return x * x + y * y + z * z; }
    Float norm() const { return std::sqrt(norm2()); }
    Vec3 normalized() const {
        Float n = norm();
        assert(n > 0);
        return *this / n;
    }
    Float max_component() const { return std::max(x, std::max(y, z)); }
    Float min_component() const { return std::min(x, std::min(y, z)); }
};

inline Vec3 operator*(Float s, const Vec3 &v) { return v * s; }

inline std::ostream &operator<<(std::ostream &os, const Vec3 &v) {
    return os << "[" << v.x << ", " << v.y << ", " << v.z << "]";
}

/// Symmetric 2x2 matrix; carries the diffusivity and coherence-shape tensors.
struct Mat2 {
    Float a = 0, b = 0, c = 0;  // [[a, b], [b, c]]

    Mat2() = default;
    Mat2(Float a, Float b, Float c) : a(a), b(b), c(c) {}

    static Mat2 identity() { return {1, 0, 1}; }
    static Mat2 diag(Float d0, Float d1) { return {d0, 0, d1}; }
    static Mat2 isotropic(Float s) { return {s, 0, s}; }

    Mat2 operator+(const Mat2 &o) const { return {a + o.a, b + o.b, c + o.c}; }
    Mat2 operator*(Float s) const { return {a * s, b * s, c * s}; }

    Float det() const { return a * c - b * b; }
    Float trace() const { return a + c; }

    bool is_spd(Float tol = 0) const { return a > tol && c > tol && det() > tol; }

    Mat2 inverse() const {
        Float d = det();
        assert(d != 0);
        return Mat2{c / d, -b / d, a / d};
    }

    // R(phi)^T M R(phi): rotation of the tensor's principal frame.
    Mat2 rotated(Float phi) const {
        Float cp = std::cos(phi), sp = std::sin(phi);
        // R = [[cp, -sp], [sp, cp]]; result = R M R^T
        Float ra = cp * (a * cp - b * sp) - sp * (b * cp - c * sp);
        Float rb = cp * (a * sp + b * cp) - sp * (b * sp + c * cp);
        Float rc = sp * (a * sp + b * cp) + cp * (b * sp + c * cp);
        return {ra, rb, rc};
    }

    Vec2 mul(const Vec2 &v) const { return {a * v.x + b * v.y, b * v.x + c * v.y}; }

    // min/max eigenvalues of the symmetric matrix
    Float eig_min() const {
        Float m = 0.5 * (a + c), d = std::sqrt(sqr(0.5 * (a - c)) + b * b);
        return m - d;
    }
    Float eig_max() const {
        Float m = 0.5 * (a + c), d = std::sqrt(sqr(0.5 * (a - c)) + b * b);
        return m + d;
    }
};

inline bool nearly_equal(Float a, Float b, Float rel = 1e-9, Float abs = 0) {
    return std::abs(a - b) <= std::max(abs, rel * std::max(std::abs(a), std::abs(b)));
}

// Linear interpolation into a sorted table of (x, y) pairs, clamping at the ends.
template <typename GetX, typename GetY>
Float interp_sorted(std::size_t n, GetX x_of, GetY y_of, Float x) {
    assert(n > 0);
    if (x <= x_of(0)) return y_of(0);
    if (x >= x_of(n - 1)) return y_of(n - 1);
    std::size_t lo = 0, hi = n - 1;
    while (hi - lo > 1) {
        std::size_t mid = (lo + hi) / 2;
        if (x_of(mid) <= x) lo = mid; else hi = mid;
    }
    Float x0 = x_of(lo), x1 = x_of(hi);
    Float t = x1 > x0 ? (x - x0) / (x1 - x0) : 0.0;
    return (1 - t) * y_of(lo) + t * y_of(hi);
}

} // namespace waveray
