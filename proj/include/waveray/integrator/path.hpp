// waveray: a spectral wave-optics path tracer
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include "../bsdf/grating.hpp"
#include "../bsdf/harvey_shack.hpp"
#include "../bsdf/lambertian.hpp"
#include "../bsdf/specular.hpp"
#include "../scene/scene.hpp"
#include "mis.hpp"

namespace waveray {

enum class RenderMode { SampleSolve, FullyCoherent, PcBaseline };

struct RenderConfig {
    RenderMode mode = RenderMode::SampleSolve;
    int spp = 16;
    int max_depth = 16;
    int rr_depth = 3;
    uint64_t seed = 0;
    Mat2 theta_floor = Mat2::isotropic(0);  // pc-baseline shape-matrix floor [m^2]
    bool enable_ms = true;

    /// Default floor: the coherence of a 0.5 sr source at 550 nm.
    static Mat2 default_theta_floor() {
        return coherence_from_diffusivity(DiffusivityMatrix(Mat2::isotropic(0.25)), 550e-9).theta;
    }

    /// Angular proposal spread used by pc-baseline sampling.
    Mat2 baseline_blur(Float lambda_nm) const {
        Float l = lambda_nm * 1e-9;
        return theta_floor.inverse() * (l * l);
    }
};

/// One sampled interior vertex of a light path (vertex 0 is the first camera hit).
struct PathVertex {
    Hit hit;
    Vec3 wi_world;       // toward the camera side
    Vec3 wo_world;       // toward the light side
    LobeType lobe = LobeType::Diffuse;
    int m1 = 0, m2 = 0;
    bool delta = true;   // delta in the active mode (divides by lobe_prob, no pdf)
    Float pdf_fwd = 0;   // solid-angle sampling density (continuous lobes)
    Float lobe_prob = 1; // discrete lobe probability (delta lobes)
    Float eta_ratio = 1;
};

enum class ConnectionKind { Organic, Nee, Manifold };

/// A sensor-to-emitter path produced by the sample stage, ready for the solve.
struct CompletedPath {
    std::vector<PathVertex> vertices;
    ConnectionKind kind = ConnectionKind::Organic;
    int emitter = -1;
    Vec3 light_dir;          // world direction from the last vertex toward the light
    Float light_distance = Infinity;
    Float light_pdf = 0;     // NEE solid-angle density (kind == Nee)
    Float ms_scale = 1;      // manifold connections: jacobian / pdf / probability
    Float mis = 1;           // strategy weight at the hero wavelength
    Float rr_weight = 1;     // accumulated Russian-roulette compensation
    CoherenceSourcing sourcing;
    Float env_scale = 1;
    Vec3 light_point, light_normal;
    bool dispersive = false; // path contains a dispersive delta segment
};

namespace detail {

inline bool is_grating_material(const DiffractiveBsdf *m) {
    return dynamic_cast<const GratingBsdf *>(m) != nullptr;
}

/// Gratings lose their delta character under pc-baseline sampling.
inline bool lobe_is_delta_in_mode(const RenderConfig &cfg, const DiffractiveBsdf *mat,
                                  LobeType lobe) {
    if (!is_delta(lobe)) return false;
    if (cfg.mode == RenderMode::PcBaseline && lobe == LobeType::GratingOrder) return false;
    (void)mat;
    return true;
}

/// Continuous solid-angle density of the mode's sampler at this vertex.
inline Float mode_pdf(const RenderConfig &cfg, const DiffractiveBsdf &mat, const Vec3 &wi,
                      const Vec3 &wo, Float lambda) {
    Float p = mat.has_continuous_lobe() ? mat.pdf(wi, wo, lambda) : 0;
    if (cfg.mode == RenderMode::PcBaseline) {
        Mat2 blur = cfg.baseline_blur(lambda);
        for (auto &l : mat.delta_lobes(wi, lambda))
            if (l.type == LobeType::GratingOrder)
                p += l.prob * gaussian_lobe_density(angular_deviation(wo, l.wo), blur);
    }
    return p;
}

/// Whether next-event estimation applies at this vertex in this mode.
inline bool nee_applicable(const RenderConfig &cfg, const DiffractiveBsdf &mat, const Vec3 &wi,
                           Float lambda) {
    if (mat.has_continuous_lobe()) return true;
    if (cfg.mode == RenderMode::PcBaseline)
        for (auto &l : mat.delta_lobes(wi, lambda))
            if (l.type == LobeType::GratingOrder) return true;
    return false;
}

/// Mode-aware direction sampling; pc-baseline broadens grating orders into
/// Gaussian proposals with the floor's angular spread.
inline DirectionSample mode_sample(const RenderConfig &cfg, const DiffractiveBsdf &mat,
                                   const Vec3 &wi, Float lambda, Pcg32 &rng) {
    if (cfg.mode != RenderMode::PcBaseline || !is_grating_material(&mat))
        return mat.sample(wi, lambda, rng);

    auto lobes = mat.delta_lobes(wi, lambda);
    if (lobes.empty()) return {};
    Float u = rng.next_float();
    Float acc = 0;
    const DeltaLobe *pick = &lobes.back();
    for (auto &l : lobes) {
        acc += l.prob;
        if (u < acc) {
            pick = &l;
            break;
        }
    }
    Mat2 blur = cfg.baseline_blur(lambda);
    Float s1 = std::sqrt(std::max(blur.eig_max(), Float(0)));
    Float s2 = std::sqrt(std::max(blur.eig_min(), Float(0)));
    Float phi = 0.5 * std::atan2(2 * blur.b, blur.a - blur.c);
    // Box-Muller pair in the principal frame of the proposal covariance
    Float u1 = std::max(rng.next_float(), 1e-12), u2 = rng.next_float();
    Float r = std::sqrt(-2 * std::log(u1));
    Float g1 = r * std::cos(TwoPi * u2) * s1, g2 = r * std::sin(TwoPi * u2) * s2;
    Vec2 dev{g1 * std::cos(phi) - g2 * std::sin(phi), g1 * std::sin(phi) + g2 * std::cos(phi)};
    Frame f(pick->wo);
    Vec3 wo = pick->wo + f.s * dev.x + f.t * dev.y;
    Float n = wo.norm();
    DirectionSample s;
    if (n <= 0) return s;
    wo = wo / n;
    if (wo.z <= 0) return s;  // proposal fell below the horizon: dead sample
    s.wo = wo;
    s.pdf = mode_pdf(cfg, mat, wi, wo, lambda);
    if (s.pdf <= 0) return s;
    s.lobe = LobeType::GratingOrder;
    s.m1 = pick->m1;
    s.m2 = pick->m2;
    s.lobe_prob = pick->prob;
    // provisional throughput for roulette; the solve recomputes true values
    s.weight = pick->weight * (gaussian_lobe_density(angular_deviation(wo, pick->wo), blur) /
                               s.pdf);
    s.valid = true;
    return s;
}

} // namespace detail

/// Backward sample stage: walk a generalized ray from the sensor, attempting
/// next-event and manifold connections, and emit every light-connected path.
/// Manifold connections are generated by `ms_hook` so the tracer stays agnostic
/// of the solver; `ms_mis(vertices, chain_start, emitter, dir, point)` returns
/// the balance weight of an organic arrival against the manifold strategy.
template <typename MsHook, typename MsMis>
void trace_sample(const Scene &scene, const RenderConfig &cfg, const Ray &camera_ray,
                  Float hero_lambda, Pcg32 &rng, std::vector<CompletedPath> &out,
                  MsHook &&ms_hook, MsMis &&ms_mis) {
    std::vector<PathVertex> vertices;
    Ray ray = camera_ray;
    Float throughput = 1;
    Float rr_weight = 1;
    bool dispersive = false;

    // vertices since the last non-delta vertex, for the manifold-ownership rule
    int delta_chain_start = -1;

    for (int depth = 0; depth < cfg.max_depth; ++depth) {
        Hit hit = scene.intersect(ray);

        if (!hit.valid()) {
            auto esc = scene.escape(ray.direction);
            if (esc.emitter >= 0) {
                CompletedPath path;
                path.vertices = vertices;
                path.kind = ConnectionKind::Organic;
                path.emitter = esc.emitter;
                path.light_dir = ray.direction;
                path.light_distance = Infinity;
                path.env_scale = esc.scale;
                path.rr_weight = rr_weight;
                path.dispersive = dispersive;
                const Emitter &em = scene.emitters[esc.emitter];
                path.sourcing.distant = true;
                path.sourcing.solid_angle =
                    em.kind == Emitter::Kind::Distant
                        ? em.solid_angle
                        : 4 * em.env_pixel_solid_angle(em.envmap.height / 2);
                if (vertices.empty() || vertices.back().delta) {
                    // delta arrivals are unmatchable by NEE; hinted chains
                    // combine with the manifold strategy instead
                    path.mis = delta_chain_start >= 0
                                   ? ms_mis(vertices, delta_chain_start, esc.emitter,
                                            ray.direction, Vec3())
                                   : 1;
                } else {
                    const PathVertex &last = vertices.back();
                    Float p_nee = scene.emitter_direction_pdf(
                        esc.emitter, last.hit.position, ray.direction, Infinity, 1);
                    path.mis = mis_weight(last.pdf_fwd, p_nee);
                }
                out.push_back(std::move(path));
            }
            return;
        }

        // organic arrival on an emissive surface
        if (hit.emitter >= 0 && hit.front) {
            CompletedPath path;
            path.vertices = vertices;
            path.kind = ConnectionKind::Organic;
            path.emitter = hit.emitter;
            path.light_dir = ray.direction;
            path.light_distance = hit.t;
            path.light_point = hit.position;
            path.light_normal = hit.ng;
            path.rr_weight = rr_weight;
            path.dispersive = dispersive;
            const Emitter &em = scene.emitters[hit.emitter];
            path.sourcing.distant = false;
            path.sourcing.area = em.sourcing_area;
            if (vertices.empty() || vertices.back().delta) {
                path.mis = delta_chain_start >= 0
                               ? ms_mis(vertices, delta_chain_start, hit.emitter,
                                        ray.direction, hit.position)
                               : 1;
            } else {
                const PathVertex &last = vertices.back();
                Float cos_l = -ray.direction.dot(hit.ng);
                Float p_nee = scene.emitter_direction_pdf(hit.emitter, last.hit.position,
                                                          ray.direction, hit.t, cos_l);
                path.mis = mis_weight(last.pdf_fwd, p_nee);
            }
            out.push_back(std::move(path));
        }

        if (hit.material < 0) return;  // pure emitter surfaces end the walk
        const DiffractiveBsdf &mat = *scene.materials[hit.material];

        PathVertex vertex;
        vertex.hit = hit;
        vertex.wi_world = -ray.direction;

        Vec3 wi_local = hit.shading.to_local(vertex.wi_world);
        if (wi_local.z <= 0 && mat.has_continuous_lobe()) return;  // grazing the back face

        // next-event estimation
        if (detail::nee_applicable(cfg, mat, wi_local, hero_lambda) &&
            !scene.emitters.empty()) {
            auto ls = scene.sample_emitter(hit.position, rng);
            if (ls.valid()) {
                Vec3 wl_local = hit.shading.to_local(ls.direction);
                if (wl_local.z > 0 &&
                    !scene.occluded(hit.position + hit.ng * RayEpsilon, ls.direction,
                                    std::min(ls.distance, Float(1e8)))) {
                    Float p_bsdf =
                        detail::mode_pdf(cfg, mat, wi_local, wl_local, hero_lambda);
                    CompletedPath path;
                    path.vertices = vertices;
                    PathVertex nee_vertex = vertex;
                    nee_vertex.wo_world = ls.direction;
                    nee_vertex.lobe = LobeType::Diffuse;
                    nee_vertex.delta = false;
                    nee_vertex.pdf_fwd = ls.pdf;
                    path.vertices.push_back(nee_vertex);
                    path.kind = ConnectionKind::Nee;
                    path.emitter = ls.emitter;
                    path.light_dir = ls.direction;
                    path.light_distance = ls.distance;
                    path.light_pdf = ls.pdf;
                    path.light_point = ls.light_point;
                    path.light_normal = ls.light_normal;
                    path.env_scale = ls.env_scale;
                    path.sourcing = ls.sourcing;
                    path.rr_weight = rr_weight;
                    path.dispersive = dispersive;
                    path.mis = mis_weight(ls.pdf, p_bsdf);
                    out.push_back(std::move(path));
                }
            }
        }

        vertices.push_back(vertex);

        // manifold next-event connections launch from non-delta vertices
        if (cfg.enable_ms && mat.has_continuous_lobe())
            ms_hook(vertices, rr_weight, dispersive, rng);

        // continue the walk
        auto smp = detail::mode_sample(cfg, mat, wi_local, hero_lambda, rng);
        if (!smp.valid || smp.weight.m[0][0] <= 0) return;

        PathVertex &v = vertices.back();
        v.wo_world = hit.shading.to_world(smp.wo);
        v.lobe = smp.lobe;
        v.m1 = smp.m1;
        v.m2 = smp.m2;
        v.delta = detail::lobe_is_delta_in_mode(cfg, &mat, smp.lobe) && smp.pdf == 0;
        v.pdf_fwd = smp.pdf;
        v.lobe_prob = smp.lobe_prob;
        v.eta_ratio = smp.eta_ratio;
        if (smp.dispersive_delta) dispersive = true;

        if (v.delta) {
            if (delta_chain_start < 0) delta_chain_start = (int)vertices.size() - 1;
        } else {
            delta_chain_start = -1;
        }

        throughput *= smp.weight.m[0][0];

        if (depth + 1 >= cfg.rr_depth) {
            Float survive = std::min(Float(1), throughput);
            if (rng.next_float() >= survive) return;
            rr_weight /= survive;
        }

        Vec3 offset_n = v.wo_world.dot(hit.ng) > 0 ? hit.ng : -hit.ng;
        ray.origin = hit.position + offset_n * RayEpsilon;
        ray.direction = v.wo_world;
        ray.t_max = Infinity;
    }
}

/// Convenience overload without manifold hooks.
template <typename MsHook>
void trace_sample(const Scene &scene, const RenderConfig &cfg, const Ray &camera_ray,
                  Float hero_lambda, Pcg32 &rng, std::vector<CompletedPath> &out,
                  MsHook &&ms_hook) {
    trace_sample(scene, cfg, camera_ray, hero_lambda, rng, out,
                 std::forward<MsHook>(ms_hook),
                 [](const std::vector<PathVertex> &, int, int, const Vec3 &, const Vec3 &) {
                     return Float(1);
                 });
}

} // namespace waveray
