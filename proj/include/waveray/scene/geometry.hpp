// waveray: a spectral wave-optics path tracer
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <vector>

#include "../core/frame.hpp"

namespace waveray {

struct Ray {
    Vec3 origin;
    Vec3 direction;  // normalized
    Float t_max = Infinity;
};

/// Surface interaction record.
struct Hit {
    Float t = Infinity;
    Vec3 position;
    Vec3 ng;             // geometric normal (faces the ray origin side)
    Frame shading;       // orthonormal tangent frame; n = shading normal
    int material = -1;
    int emitter = -1;    // area emitter index, or -1
    int mesh = -1;
    uint32_t prim = 0;
    bool front = true;   // hit on the oriented front face

    bool valid() const { return t < Infinity; }
};

struct TriangleMesh {
    std::vector<Vec3> positions;
    std::vector<uint32_t> indices;  // triples
    int material = -1;
    int emitter = -1;               // filled by the scene when emissive
    Float tangent_angle = 0;        // rotation of the tangent frame about n (radians)

    std::size_t triangle_count() const { return indices.size() / 3; }

    void triangle(std::size_t i, Vec3 &a, Vec3 &b, Vec3 &c) const {
        a = positions[indices[3 * i]];
        b = positions[indices[3 * i + 1]];
        c = positions[indices[3 * i + 2]];
    }

    Float area() const {
        Float acc = 0;
        for (std::size_t i = 0; i < triangle_count(); ++i) {
            Vec3 a, b, c;
            triangle(i, a, b, c);
            acc += 0.5 * (b - a).cross(c - a).norm();
        }
        return acc;
    }
};

/// Moller-Trumbore; returns t, barycentrics.
inline bool intersect_triangle(const Ray &ray, const Vec3 &a, const Vec3 &b, const Vec3 &c,
                               Float *t_out, Float *u_out, Float *v_out) {
    Vec3 e1 = b - a, e2 = c - a;
    Vec3 p = ray.direction.cross(e2);
    Float det = e1.dot(p);
    if (std::abs(det) < 1e-14) return false;
    Float inv = 1 / det;
    Vec3 s = ray.origin - a;
    Float u = s.dot(p) * inv;
    if (u < 0 || u > 1) return false;
    Vec3 q = s.cross(e1);
    Float v = ray.direction.dot(q) * inv;
    if (v < 0 || u + v > 1) return false;
    Float t = e2.dot(q) * inv;
    if (t <= RayEpsilon || t >= ray.t_max) return false;
    *t_out = t;
    *u_out = u;
    *v_out = v;
    return true;
}

/// Deterministic per-face shading frame: tangent from the first edge projected
/// into the surface plane, rotated by the mesh's tangent angle.
inline Frame face_frame(const Vec3 &a, const Vec3 &b, const Vec3 &c, Float tangent_angle) {
    Vec3 n = (b - a).cross(c - a).normalized();
    Vec3 e = (b - a) - n * (b - a).dot(n);
    Vec3 s = e.norm() > 1e-12 ? e.normalized() : Frame(n).s;
    if (tangent_angle != 0) {
        Vec3 t = n.cross(s);
        s = s * std::cos(tangent_angle) + t * std::sin(tangent_angle);
    }
    Vec3 t = n.cross(s);
    return Frame(s, t, n);
}

struct Aabb {
    Vec3 lo{Infinity, Infinity, Infinity};
    Vec3 hi{-Infinity, -Infinity, -Infinity};

    void grow(const Vec3 &p) {
        for (int i = 0; i < 3; ++i) {
            lo[i] = std::min(lo[i], p[i]);
            hi[i] = std::max(hi[i], p[i]);
        }
    }
    void grow(const Aabb &o) {
        grow(o.lo);
        grow(o.hi);
    }
    Vec3 center() const { return (lo + hi) * 0.5; }
    Float surface_area() const {
        if (hi.x < lo.x) return 0;
        Vec3 d = hi - lo;
        return 2 * (d.x * d.y + d.y * d.z + d.z * d.x);
    }
    bool contains(const Vec3 &p) const {
        return p.x >= lo.x && p.x <= hi.x && p.y >= lo.y && p.y <= hi.y && p.z >= lo.z &&
               p.z <= hi.z;
    }

    bool hit(const Ray &ray, const Vec3 &inv_dir, Float t_max) const {
        Float t0 = 0, t1 = t_max;
        for (int i = 0; i < 3; ++i) {
            Float near = (lo[i] - ray.origin[i]) * inv_dir[i];
            Float far = (hi[i] - ray.origin[i]) * inv_dir[i];
            if (near > far) std::swap(near, far);
            t0 = std::max(t0, near);
            t1 = std::min(t1, far);
            if (t0 > t1) return false;
        }
        return true;
    }
};

} // namespace waveray
