// waveray: a spectral wave-optics path tracer
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include "path.hpp"

namespace waveray {

/// Manifold next-event estimation: deterministic connections from a scattering
/// vertex to an emitter across one or two delta interfaces. Flat single-bounce
/// chains (mirrors, grating orders) to distant sources solve in closed form
/// through the tangential-wavevector constraint; dielectric slabs to area
/// sources run a damped Newton iteration on the exit-ray constraint. Organic
/// paths through the same chains combine with these connections by the balance
/// heuristic; the solver itself defines the manifold strategy's support.
class ManifoldConnector {
public:
    static constexpr int MaxIterations = 20;
    static constexpr Float ConstraintTol = 1e-5;

    ManifoldConnector(const Scene &scene, const RenderConfig &cfg) : m_scene(scene), m_cfg(cfg) {}

    /// Attempt every hinted connection from the scattering vertex at the back of
    /// `vertices`; append completed paths to `out`.
    void connect(const std::vector<PathVertex> &vertices, Float rr_weight, bool dispersive,
                 Float hero_lambda, Pcg32 &rng, std::vector<CompletedPath> &out) const {
        for (auto &hint : m_scene.ms_hints) {
            const Emitter &em = m_scene.emitters[hint.emitter];
            const TriangleMesh &via = m_scene.meshes[hint.via_mesh];
            if (via.material < 0) continue;
            const DiffractiveBsdf &mat = *m_scene.materials[via.material];
            if (em.kind == Emitter::Kind::Distant) {
                LobeType chain_lobe = detail::is_grating_material(&mat)
                                          ? LobeType::GratingOrder
                                          : LobeType::DeltaReflect;
                if (!detail::lobe_is_delta_in_mode(m_cfg, &mat, chain_lobe)) continue;
                connect_flat_distant(vertices, rr_weight, dispersive, hero_lambda, hint, rng,
                                     out);
            } else if (em.kind == Emitter::Kind::Area) {
                if (dynamic_cast<const SmoothDielectricBsdf *>(&mat) == nullptr) continue;
                connect_slab_area(vertices, rr_weight, dispersive, hero_lambda, hint, rng, out);
            }
        }
    }

    /// MIS weight of an organic path that reached `emitter` through the delta
    /// chain vertices[chain_start..]: p_org / (p_org + p_ms), or 1 when the
    /// manifold strategy cannot produce this connection.
    Float organic_mis(const std::vector<PathVertex> &vertices, int chain_start, int emitter,
                      const Vec3 &light_dir, const Vec3 &light_point, Float lambda) const {
        if (!m_cfg.enable_ms || chain_start <= 0) return 1;
        const int chain_len = (int)vertices.size() - chain_start;
        if (chain_len < 1 || chain_len > 2) return 1;
        int mesh = vertices[(std::size_t)chain_start].hit.mesh;
        for (int i = chain_start; i < (int)vertices.size(); ++i) {
            if (!vertices[(std::size_t)i].delta) return 1;
            if (vertices[(std::size_t)i].hit.mesh != mesh) return 1;
        }
        bool hinted = false;
        for (auto &h : m_scene.ms_hints)
            if (h.emitter == emitter && h.via_mesh == mesh) hinted = true;
        if (!hinted) return 1;
        const Emitter &em = m_scene.emitters[emitter];
        const PathVertex &launch = vertices[(std::size_t)(chain_start - 1)];
        if (launch.delta) return 1;
        MsHint hint{emitter, mesh};

        if (em.kind == Emitter::Kind::Distant && chain_len == 1) {
            const PathVertex &cv = vertices[(std::size_t)chain_start];
            const DiffractiveBsdf &mat = *m_scene.materials[cv.hit.material];
            LobeType chain_lobe = detail::is_grating_material(&mat) ? LobeType::GratingOrder
                                                                    : LobeType::DeltaReflect;
            if (!detail::lobe_is_delta_in_mode(m_cfg, &mat, chain_lobe)) return 1;
            FlatSolution sol;
            if (!solve_flat_chain(launch, hint, light_dir, cv.lobe, cv.m1, cv.m2, lambda, &sol))
                return 1;
            if (sol.toward_launch.dot(cv.wi_world) < 1 - 1e-9) return 1;
            Float p_ms = flat_ms_density(sol, em);
            Float p_org = flat_org_density(launch, sol, lambda);
            return p_ms > 0 ? p_org / (p_org + p_ms) : 1;
        }
        if (em.kind == Emitter::Kind::Area && chain_len == 2) {
            const DiffractiveBsdf &mat =
                *m_scene.materials[vertices[(std::size_t)chain_start].hit.material];
            if (dynamic_cast<const SmoothDielectricBsdf *>(&mat) == nullptr) return 1;
            SlabSolution sol;
            if (!solve_slab_for_target(launch, hint, light_point, lambda, &sol)) return 1;
            if ((sol.ev.p_bot - vertices[(std::size_t)chain_start].hit.position).norm() >
                100 * ConstraintTol)
                return 1;
            Float p_ms = slab_ms_density(sol, em);
            Float p_org = slab_org_density(launch, sol, lambda);
            return p_ms > 0 ? p_org / (p_org + p_ms) : 1;
        }
        return 1;
    }

    /// Closed-form planar refraction: the radial offset of the refraction point
    /// for a ray crossing one interface between heights h_above and h_below with
    /// lateral separation `lateral` (1-D root find; the slab oracle).
    static Float planar_refraction_radius(Float h_above, Float h_below, Float lateral,
                                          Float eta) {
        Float lo = 0, hi = lateral;
        for (int i = 0; i < 200; ++i) {
            Float r = 0.5 * (lo + hi);
            Float sin_i = r / std::sqrt(r * r + h_above * h_above);
            Float s = lateral - r;
            Float sin_t = s / std::sqrt(s * s + h_below * h_below);
            if (sin_i - eta * sin_t > 0) hi = r; else lo = r;
        }
        return 0.5 * (lo + hi);
    }

private:
    // ---------------- flat delta chain (grating strip / mirror) ----------------

    struct FlatSolution {
        Vec3 toward_launch;  // from the chain vertex toward the launch vertex
        Vec3 to_light;
        Hit y;               // chain vertex hit
        Vec3 wl_local;       // to_light in the chain vertex frame
        Vec3 wo_local;       // toward_launch in the chain vertex frame
        Float lobe_prob = 0; // light-side selection probability of this order
        MuellerMatrix weight;
        LobeType lobe = LobeType::DeltaReflect;
        int m1 = 0, m2 = 0;
    };

    static bool frames_match(const Frame &a, const Frame &b) {
        return a.n.dot(b.n) > 1 - 1e-12 && a.s.dot(b.s) > 1 - 1e-12;
    }

    /// Solve one flat delta chain for the given order. `seed_lobe`, when
    /// supplied, is the candidate already enumerated at the face-0 frame.
    bool solve_flat_chain(const PathVertex &launch, const MsHint &hint, const Vec3 &to_light,
                          LobeType lobe, int m1, int m2, Float lambda, FlatSolution *out,
                          const Frame *strip_frame = nullptr,
                          const DeltaLobe *seed_lobe = nullptr) const {
        const TriangleMesh &via = m_scene.meshes[hint.via_mesh];
        const DiffractiveBsdf &mat = *m_scene.materials[via.material];
        Frame strip;
        if (strip_frame) {
            strip = *strip_frame;
        } else {
            Vec3 a, b, c;
            via.triangle(0, a, b, c);
            strip = face_frame(a, b, c, via.tangent_angle);
        }
        Vec3 wl = strip.to_local(to_light);
        if (wl.z <= 0) return false;

        auto find_lobe = [&](const Frame &f) -> std::optional<DeltaLobe> {
            Vec3 wl_f = f.to_local(to_light);
            if (wl_f.z <= 0) return std::nullopt;
            for (auto &l : mat.delta_lobes(wl_f, lambda))
                if (l.type == lobe && l.m1 == m1 && l.m2 == m2) return l;
            return std::nullopt;
        };
        std::optional<DeltaLobe> cand =
            seed_lobe ? std::optional<DeltaLobe>(*seed_lobe) : find_lobe(strip);
        if (!cand) return false;
        Vec3 toward_launch = strip.to_world(cand->wo);
        Frame cand_frame = strip;
        Hit y;
        bool converged = false;
        for (int it = 0; it < MaxIterations && !converged; ++it) {
            Ray probe;
            probe.origin = launch.hit.position + launch.hit.ng * RayEpsilon;
            probe.direction = -toward_launch;
            y = m_scene.intersect(probe);
            if (!y.valid() || y.mesh != hint.via_mesh || !y.front) return false;
            if (frames_match(y.shading, cand_frame)) {
                // flat chain: the candidate solves the constraint exactly
                converged = true;
                break;
            }
            auto refined = find_lobe(y.shading);
            if (!refined) return false;
            Vec3 dir = y.shading.to_world(refined->wo);
            if ((dir - toward_launch).norm() < ConstraintTol) converged = true;
            toward_launch = dir;
            cand = refined;
            cand_frame = y.shading;
        }
        if (!converged) return false;
        out->lobe_prob = cand->prob;
        out->weight = cand->weight;
        out->wl_local = y.shading.to_local(to_light);
        out->wo_local = y.shading.to_local(toward_launch);
        out->toward_launch = toward_launch;
        out->to_light = to_light;
        out->y = y;
        out->lobe = lobe;
        out->m1 = m1;
        out->m2 = m2;
        return true;
    }

    /// Manifold strategy density over the launch vertex's outgoing direction.
    Float flat_ms_density(const FlatSolution &sol, const Emitter &em) const {
        // omega_L drawn over the cone; |d omega_1 / d omega_L| = wl.z / |wo.z|
        Float jac = sol.wl_local.z / std::max(std::abs(sol.wo_local.z), Float(1e-9));
        return 1 / (em.solid_angle * jac);
    }

    /// Organic strategy density over the same direction: the launch material's
    /// sampling pdf times the light-side order selection probability.
    Float flat_org_density(const PathVertex &launch, const FlatSolution &sol,
                           Float lambda) const {
        if (launch.hit.material < 0) return 0;
        const DiffractiveBsdf &launch_mat = *m_scene.materials[launch.hit.material];
        Vec3 wi = launch.hit.shading.to_local(launch.wi_world);
        Vec3 wo = launch.hit.shading.to_local(-sol.toward_launch);
        Float p = detail::mode_pdf(m_cfg, launch_mat, wi, wo, lambda);
        return p * sol.lobe_prob;
    }

    void connect_flat_distant(const std::vector<PathVertex> &vertices, Float rr_weight,
                              bool dispersive, Float lambda, const MsHint &hint, Pcg32 &rng,
                              std::vector<CompletedPath> &out) const {
        const PathVertex &launch = vertices.back();
        const Emitter &em = m_scene.emitters[hint.emitter];
        const TriangleMesh &via = m_scene.meshes[hint.via_mesh];
        const DiffractiveBsdf &mat = *m_scene.materials[via.material];

        Frame light_frame(-em.travel_direction);
        Vec3 to_light = light_frame.to_world(sample_uniform_cone(rng.next_2d(), em.solid_angle));

        // enumerate candidate orders at the face-0 frame, then solve each
        Vec3 a, b, c;
        via.triangle(0, a, b, c);
        Frame strip = face_frame(a, b, c, via.tangent_angle);
        Vec3 wl0 = strip.to_local(to_light);
        if (wl0.z <= 0) return;

        Aabb strip_bounds;
        for (auto &p : via.positions) strip_bounds.grow(p);

        for (auto &cand : mat.delta_lobes(wl0, lambda)) {
            // cheap pre-tests before the full chain solve: the launch vertex must
            // face the strip and the probe must enter the strip's bounds
            Vec3 probe_dir = -strip.to_world(cand.wo);
            if (probe_dir.dot(launch.hit.ng) <= 0) continue;
            {
                Ray pre;
                pre.origin = launch.hit.position;
                pre.direction = probe_dir;
                pre.t_max = Infinity;
                Vec3 inv{1 / probe_dir.x, 1 / probe_dir.y, 1 / probe_dir.z};
                if (!strip_bounds.hit(pre, inv, Infinity)) continue;
            }
            FlatSolution sol;
            if (!solve_flat_chain(launch, hint, to_light, cand.type, cand.m1, cand.m2, lambda,
                                  &sol, &strip, &cand))
                continue;
            if (m_scene.occluded(sol.y.position + sol.y.ng * RayEpsilon, to_light, 1e8))
                continue;
            Vec3 w1 = -sol.toward_launch;
            Float cos1 = w1.dot(launch.hit.ng);
            if (cos1 <= 0) continue;

            CompletedPath path;
            path.vertices = vertices;
            path.vertices.back().wo_world = w1;
            path.vertices.back().lobe = LobeType::Diffuse;
            path.vertices.back().delta = false;
            path.vertices.back().pdf_fwd = 1;  // measure handled by ms_scale

            PathVertex strip_vertex;
            strip_vertex.hit = sol.y;
            strip_vertex.wi_world = sol.toward_launch;
            strip_vertex.wo_world = to_light;
            strip_vertex.lobe = sol.lobe;
            strip_vertex.m1 = sol.m1;
            strip_vertex.m2 = sol.m2;
            strip_vertex.delta = true;
            strip_vertex.lobe_prob = 1;  // enumerated, not sampled
            path.vertices.push_back(strip_vertex);

            path.kind = ConnectionKind::Manifold;
            path.emitter = hint.emitter;
            path.light_dir = to_light;
            path.light_distance = Infinity;
            path.rr_weight = rr_weight;
            path.dispersive = dispersive;
            path.sourcing.distant = true;
            path.sourcing.solid_angle = em.solid_angle;
            Float p_ms = flat_ms_density(sol, em);
            Float p_org = flat_org_density(launch, sol, lambda);
            path.ms_scale = 1 / p_ms;
            path.mis = p_ms / (p_ms + p_org);
            out.push_back(std::move(path));
        }
    }

    // ---------------- dielectric slab to an area source ----------------

    struct ChainEval {
        bool valid = false;
        Vec3 p_bot, p_top;
        Vec3 d1, d2, d3;
        Hit bot_hit, top_hit;
        Vec2 residual;  // offset from the target on the light plane
        Float eta_rel = 1;
    };

    struct SlabSolution {
        ChainEval ev;
        Vec3 light_point;
        Frame light_frame;
        Frame bot;
        Vec3 bot_origin;
        Float jac = 0;  // |d omega_1 / d A_light|
        Float p_hat = 1;
    };

    ChainEval eval_slab_chain(const Vec3 &from, const Vec2 &param, const Frame &bot,
                              const Vec3 &bot_origin, int via_mesh, const Vec3 &target,
                              const Frame &light_frame, Float lambda) const {
        ChainEval ev;
        Vec3 p = bot_origin + bot.s * param.x + bot.t * param.y;
        Vec3 d1 = p - from;
        Float dist1 = d1.norm();
        if (dist1 <= RayEpsilon) return ev;
        d1 = d1 / dist1;

        Ray r1;
        r1.origin = from + d1 * RayEpsilon;
        r1.direction = d1;
        Hit h1 = m_scene.intersect(r1);
        if (!h1.valid() || h1.mesh != via_mesh) return ev;

        const auto *glass =
            dynamic_cast<const SmoothDielectricBsdf *>(m_scene.materials[h1.material].get());
        if (!glass) return ev;
        Float eta = glass->interior().eval_real(lambda) / glass->exterior();

        Vec3 n1 = h1.front ? h1.ng : -h1.ng;  // oriented toward the arriving side
        Vec3 d2;
        if (!refract(-d1, n1, eta, &d2)) return ev;
        Ray r2;
        r2.origin = h1.position + d2 * RayEpsilon;
        r2.direction = d2;
        Hit h2 = m_scene.intersect(r2);
        if (!h2.valid() || h2.mesh != via_mesh) return ev;

        Vec3 n2 = h2.front ? h2.ng : -h2.ng;
        Vec3 d3;
        if (!refract(-d2, n2, 1 / eta, &d3)) return ev;

        Float denom = d3.dot(light_frame.n);
        if (std::abs(denom) < 1e-9) return ev;
        Float t = (target - h2.position).dot(light_frame.n) / denom;
        if (t <= 0) return ev;
        Vec3 landing = h2.position + d3 * t;
        Vec3 offset = landing - target;
        ev.residual = {offset.dot(light_frame.s), offset.dot(light_frame.t)};
        ev.valid = true;
        ev.p_bot = h1.position;
        ev.p_top = h2.position;
        ev.d1 = d1;
        ev.d2 = d2;
        ev.d3 = d3;
        ev.bot_hit = h1;
        ev.top_hit = h2;
        ev.eta_rel = eta;
        return ev;
    }

    /// Newton-solve the chain from `launch` to the given light point; fills the
    /// converged chain, the generalized Jacobian, and a restart-based discovery
    /// probability (1 for planar slabs, which have a unique solution).
    bool solve_slab_for_target(const PathVertex &launch, const MsHint &hint,
                               const Vec3 &light_point, Float lambda, SlabSolution *out,
                               Pcg32 *rng = nullptr) const {
        const TriangleMesh &light_mesh = m_scene.meshes[m_scene.emitters[hint.emitter].mesh];
        Vec3 la, lb, lc;
        light_mesh.triangle(0, la, lb, lc);
        Frame light_frame((lb - la).cross(lc - la).normalized());

        const TriangleMesh &via = m_scene.meshes[hint.via_mesh];
        Vec3 a, b, c;
        via.triangle(0, a, b, c);
        Frame bot = face_frame(a, b, c, via.tangent_angle);
        if (bot.n.dot(launch.hit.position - a) < 0) bot = Frame(-bot.s, bot.t, -bot.n);
        Vec3 bot_origin = a;

        auto solve_from = [&](Vec2 x) -> std::pair<bool, ChainEval> {
            ChainEval ev;
            for (int it = 0; it < MaxIterations; ++it) {
                ev = eval_slab_chain(launch.hit.position, x, bot, bot_origin, hint.via_mesh,
                                     light_point, light_frame, lambda);
                if (!ev.valid) return {false, ev};
                if (ev.residual.norm() < ConstraintTol) return {true, ev};
                Float h = std::max(Float(1e-7), Float(1e-3) * ev.residual.norm());
                auto ex = eval_slab_chain(launch.hit.position, {x.x + h, x.y}, bot, bot_origin,
                                          hint.via_mesh, light_point, light_frame, lambda);
                auto ey = eval_slab_chain(launch.hit.position, {x.x, x.y + h}, bot, bot_origin,
                                          hint.via_mesh, light_point, light_frame, lambda);
                if (!ex.valid || !ey.valid) return {false, ev};
                Float j00 = (ex.residual.x - ev.residual.x) / h;
                Float j10 = (ex.residual.y - ev.residual.y) / h;
                Float j01 = (ey.residual.x - ev.residual.x) / h;
                Float j11 = (ey.residual.y - ev.residual.y) / h;
                Float det = j00 * j11 - j01 * j10;
                if (std::abs(det) < 1e-14) return {false, ev};
                Vec2 step{(j11 * ev.residual.x - j01 * ev.residual.y) / det,
                          (-j10 * ev.residual.x + j00 * ev.residual.y) / det};
                x = {x.x - step.x, x.y - step.y};
            }
            return {false, ev};
        };

        Vec3 to_light = light_point - launch.hit.position;
        Float denom = to_light.dot(bot.n);
        Vec2 init{0, 0};
        if (std::abs(denom) > 1e-12) {
            Float t = (bot_origin - launch.hit.position).dot(bot.n) / denom;
            Vec3 entry = launch.hit.position + to_light * t;
            init = {(entry - bot_origin).dot(bot.s), (entry - bot_origin).dot(bot.t)};
        }
        auto [ok, ev] = solve_from(init);
        if (!ok) return false;

        // independent restarts estimate the discovery probability; planar slabs
        // have a unique solution so every restart lands on the same point
        Float p_hat = 1;
        if (rng) {
            int found = 1, trials = 1;
            for (int k = 0; k < 3; ++k) {
                Vec2 jitter{init.x + 0.2 * (rng->next_float() - 0.5),
                            init.y + 0.2 * (rng->next_float() - 0.5)};
                auto [ok2, ev2] = solve_from(jitter);
                trials++;
                if (ok2 && (ev2.p_bot - ev.p_bot).norm() < 10 * ConstraintTol) found++;
            }
            p_hat = (Float)found / (Float)trials;
        }

        // |d omega_1 / d A_light| around the converged parameterization
        Float h = 1e-5;
        Vec2 sol{(ev.p_bot - bot_origin).dot(bot.s), (ev.p_bot - bot_origin).dot(bot.t)};
        auto ex = eval_slab_chain(launch.hit.position, {sol.x + h, sol.y}, bot, bot_origin,
                                  hint.via_mesh, light_point, light_frame, lambda);
        auto ey = eval_slab_chain(launch.hit.position, {sol.x, sol.y + h}, bot, bot_origin,
                                  hint.via_mesh, light_point, light_frame, lambda);
        if (!ex.valid || !ey.valid) return false;
        Float j00 = (ex.residual.x - ev.residual.x) / h;
        Float j10 = (ex.residual.y - ev.residual.y) / h;
        Float j01 = (ey.residual.x - ev.residual.x) / h;
        Float j11 = (ey.residual.y - ev.residual.y) / h;
        Float det_landing = std::abs(j00 * j11 - j01 * j10);
        if (det_landing < 1e-14) return false;
        Float dist1 = (ev.p_bot - launch.hit.position).norm();
        Float cos_bot = std::abs(ev.d1.dot(bot.n));
        Float domega_dparam = cos_bot / (dist1 * dist1);

        out->ev = ev;
        out->light_point = light_point;
        out->light_frame = light_frame;
        out->bot = bot;
        out->bot_origin = bot_origin;
        out->jac = domega_dparam / det_landing;
        out->p_hat = p_hat;
        return true;
    }

    Float slab_ms_density(const SlabSolution &sol, const Emitter &em) const {
        // light point drawn uniformly by area, mapped through the chain; the
        // discovery probability is handled separately in the estimator scale
        return (1 / em.mesh_area) / sol.jac;
    }

    Float slab_org_density(const PathVertex &launch, const SlabSolution &sol,
                           Float lambda) const {
        if (launch.hit.material < 0) return 0;
        const DiffractiveBsdf &launch_mat = *m_scene.materials[launch.hit.material];
        Vec3 wi = launch.hit.shading.to_local(launch.wi_world);
        Vec3 wo = launch.hit.shading.to_local(sol.ev.d1);
        Float p = detail::mode_pdf(m_cfg, launch_mat, wi, wo, lambda);
        // light-side refract selection probabilities at the two interfaces
        auto q_of = [&](const Hit &hit, const Vec3 &wl_world) {
            const DiffractiveBsdf &m = *m_scene.materials[hit.material];
            Vec3 wl = hit.shading.to_local(wl_world);
            for (auto &l : m.delta_lobes(wl, lambda))
                if (l.type == LobeType::DeltaRefract) return l.prob;
            return Float(0);
        };
        Float q1 = q_of(sol.ev.bot_hit, sol.ev.d2);
        Float q2 = q_of(sol.ev.top_hit, sol.ev.d3);
        return p * q1 * q2;
    }

    void connect_slab_area(const std::vector<PathVertex> &vertices, Float rr_weight,
                           bool dispersive, Float lambda, const MsHint &hint, Pcg32 &rng,
                           std::vector<CompletedPath> &out) const {
        const PathVertex &launch = vertices.back();
        const Emitter &em = m_scene.emitters[hint.emitter];
        const TriangleMesh &light_mesh = m_scene.meshes[em.mesh];

        // uniform-area light point
        Float target_area = rng.next_float() * em.mesh_area;
        std::size_t tri = 0;
        Float acc = 0;
        for (std::size_t i = 0; i < light_mesh.triangle_count(); ++i) {
            Vec3 a, b, c;
            light_mesh.triangle(i, a, b, c);
            acc += 0.5 * (b - a).cross(c - a).norm();
            tri = i;
            if (acc >= target_area) break;
        }
        Vec3 la, lb, lc;
        light_mesh.triangle(tri, la, lb, lc);
        Float su = std::sqrt(rng.next_float()), sv = rng.next_float();
        Vec3 light_point = la * (1 - su) + lb * (su * (1 - sv)) + lc * (su * sv);

        SlabSolution sol;
        if (!solve_slab_for_target(launch, hint, light_point, lambda, &sol, &rng)) return;

        Vec3 exit_dir = sol.ev.d3;
        Float exit_dist = (light_point - sol.ev.p_top).norm();
        if (m_scene.occluded(sol.ev.p_top + exit_dir * RayEpsilon, exit_dir, exit_dist)) return;
        Float cos_light = -exit_dir.dot(sol.light_frame.n);
        if (cos_light <= 0) return;

        CompletedPath path;
        path.vertices = vertices;
        path.vertices.back().wo_world = sol.ev.d1;
        path.vertices.back().lobe = LobeType::Diffuse;
        path.vertices.back().delta = false;
        path.vertices.back().pdf_fwd = 1;

        PathVertex vbot;
        vbot.hit = sol.ev.bot_hit;
        vbot.wi_world = -sol.ev.d1;
        vbot.wo_world = sol.ev.d2;
        vbot.lobe = LobeType::DeltaRefract;
        vbot.delta = true;
        vbot.lobe_prob = 1;
        vbot.eta_ratio = sol.ev.eta_rel;
        path.vertices.push_back(vbot);

        PathVertex vtop;
        vtop.hit = sol.ev.top_hit;
        vtop.wi_world = -sol.ev.d2;
        vtop.wo_world = sol.ev.d3;
        vtop.lobe = LobeType::DeltaRefract;
        vtop.delta = true;
        vtop.lobe_prob = 1;
        vtop.eta_ratio = 1 / sol.ev.eta_rel;
        path.vertices.push_back(vtop);

        path.kind = ConnectionKind::Manifold;
        path.emitter = hint.emitter;
        path.light_dir = exit_dir;
        path.light_distance = exit_dist;
        path.light_point = light_point;
        path.light_normal = sol.light_frame.n;
        path.rr_weight = rr_weight;
        const TriangleMesh &via = m_scene.meshes[hint.via_mesh];
        const auto *glass =
            dynamic_cast<const SmoothDielectricBsdf *>(m_scene.materials[via.material].get());
        path.dispersive = dispersive || (glass && glass->interior().dispersive());
        path.sourcing.distant = false;
        path.sourcing.area = em.sourcing_area;
        Float p_ms = slab_ms_density(sol, em);
        Float p_org = slab_org_density(launch, sol, lambda);
        path.ms_scale = 1 / (p_ms * sol.p_hat);
        path.mis = p_ms / (p_ms + p_org);
        out.push_back(std::move(path));
    }

    const Scene &m_scene;
    const RenderConfig &m_cfg;
};

} // namespace waveray
