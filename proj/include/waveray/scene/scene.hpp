// waveray: a spectral wave-optics path tracer
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include "../bsdf/bsdf.hpp"
#include "bvh.hpp"
#include "camera.hpp"
#include "emitter.hpp"

namespace waveray {

/// Manifold next-event hint: connect to `emitter` through the delta chain of
/// `via_mesh` (a grating strip or a dielectric slab).
struct MsHint {
    int emitter = -1;
    int via_mesh = -1;
};

class Scene {
public:
    std::vector<TriangleMesh> meshes;
    std::vector<std::shared_ptr<DiffractiveBsdf>> materials;
    std::vector<std::string> material_names;
    std::vector<Emitter> emitters;
    std::vector<MsHint> ms_hints;
    Camera camera;
    Float min_feature_size = 1e-2;  // advisory scale bound [m]

    void finalize() {
        camera.finalize();
        for (int e = 0; e < (int)emitters.size(); ++e)
            if (emitters[e].kind == Emitter::Kind::Area && emitters[e].mesh >= 0)
                meshes[emitters[e].mesh].emitter = e;
        m_bvh.build(meshes);
        build_selection();
    }

    const Bvh &bvh() const { return m_bvh; }

    Hit intersect(const Ray &ray) const {
        Hit hit;
        Ray r = ray;
        m_bvh.traverse(r, [&](int mesh, uint32_t prim, Float &t_max) {
            Vec3 a, b, c;
            meshes[mesh].triangle(prim, a, b, c);
            Float t, u, v;
            Ray local = r;
            local.t_max = t_max;
            if (!intersect_triangle(local, a, b, c, &t, &u, &v)) return;
            t_max = t;
            hit.t = t;
            hit.position = r.origin + r.direction * t;
            // the authored frame orientation is kept: the +z side of the shading
            // frame is the exterior, which carries dielectric sidedness
            Frame f = face_frame(a, b, c, meshes[mesh].tangent_angle);
            hit.front = f.n.dot(r.direction) < 0;
            hit.shading = f;
            hit.ng = f.n;
            hit.material = meshes[mesh].material;
            hit.emitter = meshes[mesh].emitter;
            hit.mesh = mesh;
            hit.prim = prim;
        });
        return hit;
    }

    bool occluded(const Vec3 &from, const Vec3 &dir, Float distance) const {
        Ray r;
        r.origin = from;
        r.direction = dir;
        // relative margin keeps offset shadow-ray origins from re-hitting the
        // destination surface
        r.t_max = distance * (1 - 1e-4) - RayEpsilon;
        bool blocked = false;
        m_bvh.traverse(r, [&](int mesh, uint32_t prim, Float &t_max) {
            if (blocked) return;
            Vec3 a, b, c;
            meshes[mesh].triangle(prim, a, b, c);
            Float t, u, v;
            Ray local = r;
            local.t_max = t_max;
            if (intersect_triangle(local, a, b, c, &t, &u, &v)) blocked = true;
        });
        return blocked;
    }

    /// Draw an emitter and a direction toward it.
    EmitterSample sample_emitter(const Vec3 &ref, Pcg32 &rng) const {
        EmitterSample s;
        if (emitters.empty()) return s;
        Float u = rng.next_float();
        int e = 0;
        Float acc = 0;
        for (; e < (int)emitters.size(); ++e) {
            acc += m_select[e];
            if (u < acc || e + 1 == (int)emitters.size()) break;
        }
        const Emitter &em = emitters[e];
        s.emitter = e;
        s.select_prob = m_select[e];

        switch (em.kind) {
            case Emitter::Kind::Distant: {
                Frame f(-em.travel_direction);
                s.direction = f.to_world(sample_uniform_cone(rng.next_2d(), em.solid_angle));
                s.distance = Infinity;
                s.pdf = s.select_prob / em.solid_angle;
                s.sourcing.distant = true;
                s.sourcing.solid_angle = em.solid_angle;
                break;
            }
            case Emitter::Kind::Area: {
                const TriangleMesh &mesh = meshes[em.mesh];
                // pick a triangle proportional to area
                Float target = rng.next_float() * em.mesh_area;
                std::size_t tri = 0;
                Float sum = 0;
                for (std::size_t i = 0; i < mesh.triangle_count(); ++i) {
                    Vec3 a, b, c;
                    mesh.triangle(i, a, b, c);
                    sum += 0.5 * (b - a).cross(c - a).norm();
                    tri = i;
                    if (sum >= target) break;
                }
                Vec3 a, b, c;
                mesh.triangle(tri, a, b, c);
                Float su = std::sqrt(rng.next_float()), sv = rng.next_float();
                Vec3 p = a * (1 - su) + b * (su * (1 - sv)) + c * (su * sv);
                Vec3 n = (b - a).cross(c - a).normalized();
                Vec3 d = p - ref;
                Float dist = d.norm();
                if (dist <= RayEpsilon) return s;
                d = d / dist;
                Float cos_l = -d.dot(n);
                if (cos_l <= 0) return s;  // backside: no emission
                s.direction = d;
                s.distance = dist;
                s.pdf = s.select_prob * dist * dist / (cos_l * em.mesh_area);
                s.light_point = p;
                s.light_normal = n;
                s.sourcing.distant = false;
                s.sourcing.area = em.sourcing_area;
                break;
            }
            case Emitter::Kind::Envmap: {
                // importance sample the luminance-weighted texel table
                Float ur = rng.next_float() * em.env_integral;
                int y = 0;
                while (y + 1 < envmap_height(em) && em.env_row_cdf[y] < ur) ++y;
                Float row_lo = y > 0 ? em.env_row_cdf[y - 1] : 0;
                Float in_row = ur - row_lo;
                const int w = em.envmap.width;
                int x = 0;
                while (x + 1 < w && em.env_cdf[(std::size_t)y * w + x] < in_row) ++x;
                Float jx = rng.next_float(), jy = rng.next_float();
                s.direction = Emitter::env_direction((x + jx) / w, (y + jy) / em.envmap.height);
                s.distance = Infinity;
                Float texel_pdf = em.env_texel(x, y) * em.env_pixel_solid_angle(y) / em.env_integral;
                Float sa = em.env_pixel_solid_angle(y);
                if (sa <= 0 || texel_pdf <= 0) return s;
                s.pdf = s.select_prob * texel_pdf / sa;
                s.env_scale = em.env_texel(x, y);
                // a 2x2 texel cluster defines the source subtense
                s.sourcing.distant = true;
                s.sourcing.solid_angle = 4 * sa;
                break;
            }
        }
        return s;
    }

    /// Solid-angle density of sample_emitter producing `dir` toward emitter e.
    Float emitter_direction_pdf(int e, const Vec3 &ref, const Vec3 &dir, Float dist,
                                Float cos_l) const {
        const Emitter &em = emitters[e];
        switch (em.kind) {
            case Emitter::Kind::Distant: {
                Float cos_max = 1 - em.solid_angle / TwoPi;
                if (dir.dot(-em.travel_direction) < cos_max) return 0;
                return m_select[e] / em.solid_angle;
            }
            case Emitter::Kind::Area:
                if (cos_l <= 0) return 0;
                return m_select[e] * dist * dist / (cos_l * em.mesh_area);
            case Emitter::Kind::Envmap: {
                Vec2 uv = Emitter::env_uv(dir);
                int x = std::min(em.envmap.width - 1, (int)(uv.x * em.envmap.width));
                int y = std::min(em.envmap.height - 1, (int)(uv.y * em.envmap.height));
                Float sa = em.env_pixel_solid_angle(y);
                if (sa <= 0 || em.env_integral <= 0) return 0;
                return m_select[e] * em.env_texel(x, y) / em.env_integral;
            }
        }
        return 0;
    }

    /// Escaped rays: radiance scale and emitter index for distant/envmap light.
    struct EscapeHit {
        int emitter = -1;
        Float scale = 0;  // multiplies the emitter spectrum
    };
    EscapeHit escape(const Vec3 &dir) const {
        EscapeHit out;
        for (int e = 0; e < (int)emitters.size(); ++e) {
            const Emitter &em = emitters[e];
            if (em.kind == Emitter::Kind::Distant) {
                Float cos_max = 1 - em.solid_angle / TwoPi;
                if (dir.dot(-em.travel_direction) >= cos_max) {
                    out.emitter = e;
                    out.scale = 1;
                    return out;
                }
            } else if (em.kind == Emitter::Kind::Envmap) {
                Vec2 uv = Emitter::env_uv(dir);
                int x = std::min(em.envmap.width - 1, (int)(uv.x * em.envmap.width));
                int y = std::min(em.envmap.height - 1, (int)(uv.y * em.envmap.height));
                out.emitter = e;
                out.scale = em.env_texel(x, y);
                return out;
            }
        }
        return out;
    }

    Float select_prob(int e) const { return m_select[e]; }

private:
    static int envmap_height(const Emitter &em) { return em.envmap.height; }

    void build_selection() {
        m_select.assign(emitters.size(), 0);
        Float total = 0;
        for (std::size_t e = 0; e < emitters.size(); ++e) {
            const Emitter &em = emitters[e];
            // steady-state power proxy: spectral integral times geometric extent
            Float intensity = 0;
            for (Float l = LambdaMin + 5; l < LambdaMax; l += 10) intensity += em.radiance(l);
            Float extent = 1;
            switch (em.kind) {
                case Emitter::Kind::Distant: extent = em.solid_angle; break;
                case Emitter::Kind::Area: extent = em.mesh_area * Pi; break;
                case Emitter::Kind::Envmap: extent = em.env_integral; break;
            }
            m_select[e] = intensity * extent;
            total += m_select[e];
        }
        for (auto &s : m_select) s = total > 0 ? s / total : 1.0 / (Float)m_select.size();
    }

    Bvh m_bvh;
    std::vector<Float> m_select;
};

} // namespace waveray
