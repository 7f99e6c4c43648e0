// waveray: a spectral wave-optics path tracer
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include "../optics/cie.hpp"
#include "path.hpp"

namespace waveray {

namespace detail {

/// s-axis of the scattering plane spanned by the propagation direction and the
/// surface normal; falls back to the tangent frame near normal incidence.
inline Vec3 sp_axis(const Vec3 &d, const Vec3 &n, const Frame &fallback) {
    Vec3 c = d.cross(n);
    Float len = c.norm();
    return len > 1e-9 ? c / len : fallback.s;
}

/// Rotate a Stokes vector's reference axis about its propagation direction.
inline StokesVector rotate_stokes(const StokesVector &s, const Vec3 &d, const Vec3 &from_axis,
                                  const Vec3 &to_axis) {
    Float cos_phi = clamp(from_axis.dot(to_axis), -1, 1);
    Float sin_phi = clamp(d.dot(from_axis.cross(to_axis)), -1, 1);
    Float phi = std::atan2(sin_phi, cos_phi);
    return MuellerMatrix::rotator(phi) * s;
}

/// Match the delta lobe taken by the path when enumerating from the light side.
inline const DeltaLobe *match_delta_lobe(std::vector<DeltaLobe> &lobes, const Vec3 &wv_local,
                                         LobeType type) {
    const DeltaLobe *best = nullptr;
    Float best_dot = 1 - 1e-6;
    for (auto &l : lobes) {
        if (is_delta(l.type) != is_delta(type)) continue;
        Float d = l.wo.dot(wv_local);
        if (d > best_dot) {
            best_dot = d;
            best = &l;
        }
    }
    return best;
}

} // namespace detail

struct PathContribution {
    Vec3 xyz;      // CIE tristimulus accumulation (already normalized)
    double y = 0;  // luminance channel, for variance bookkeeping
};

/// Forward solve over a sampled path: source a partially-coherent bundle at the
/// emitter, evaluate the mode's BSDF values at each interaction in forward
/// order with full Mueller/Stokes arithmetic, and divide by the sample-stage
/// densities. The solve adds three emission-sampled wavelengths unless the path
/// crossed a dispersive delta segment or runs fully coherent.
inline PathContribution solve_path(const Scene &scene, const RenderConfig &cfg,
                                   const CompletedPath &path, Float hero_lambda, Float hero_pdf,
                                   Pcg32 &rng) {
    PathContribution out;
    if (path.emitter < 0) return out;
    const Emitter &emitter = scene.emitters[path.emitter];

    struct SpectralSample {
        Float lambda;
        Float weight;  // mis over wavelength strategies / strategy pdf
    };
    std::vector<SpectralSample> lambdas;
    bool hero_only = cfg.mode == RenderMode::FullyCoherent || path.dispersive || !emitter.emission;
    if (hero_only) {
        lambdas.push_back({hero_lambda, 1 / hero_pdf});
    } else {
        const EmissionSampler &es = *emitter.emission;
        Float pe_hero = es.pdf(hero_lambda);
        lambdas.push_back({hero_lambda, 1 / (hero_pdf + 3 * pe_hero)});
        // rotated equidistant offsets through the emission CDF: each marginal is
        // the emission density (so the balance weights hold), while the four
        // samples jointly stratify the spectrum
        Float t = (hero_lambda - LambdaMin) / LambdaSpan;
        for (int s = 1; s < 4; ++s) {
            Float u = t + (Float)s / 4;
            u -= std::floor(u);
            auto [l, pe] = es.sample(u);
            Float ph = hero_wavelength_pdf(l);
            lambdas.push_back({l, 1 / (ph + 3 * pe)});
        }
    }

    const int n_vertices = (int)path.vertices.size();
    std::vector<Float> hero_g0(n_vertices, 0);  // blur-kernel peaks at the hero

    for (std::size_t si = 0; si < lambdas.size(); ++si) {
        const Float lambda = lambdas[si].lambda;
        const Float lambda_m = lambda * 1e-9;
        const bool is_hero = si == 0;

        // source the bundle
        BundleState bundle;
        if (path.sourcing.distant) {
            bundle = source_distant(std::max(path.sourcing.solid_angle, Float(1e-12)), lambda_m);
            bundle.path_distance = 0;
        } else {
            Float r1 = std::min(path.light_distance, Float(1e6));
            bundle = source_area(std::max(path.sourcing.area, Float(1e-12)),
                                 std::max(r1, Float(1e-6)), lambda_m);
        }

        Float radiance = emitter.radiance(lambda) * path.env_scale;
        if (radiance <= 0) continue;
        StokesVector stokes = StokesVector::unpolarized(radiance);
        Vec3 propagation = -path.light_dir;  // light travels toward the last vertex
        Vec3 stokes_axis = Frame(propagation).s;

        bool dead = false;
        for (int j = n_vertices - 1; j >= 0 && !dead; --j) {
            const PathVertex &v = path.vertices[j];
            const DiffractiveBsdf &mat = *scene.materials[v.hit.material];
            const Frame &frame = v.hit.shading;

            Vec3 wl_world = v.wo_world;  // toward the light side
            Vec3 wv_world = v.wi_world;  // toward the camera side
            Vec3 wl = frame.to_local(wl_world);
            Vec3 wv = frame.to_local(wv_world);

            // propagate the bundle over the incoming segment (j == last: from the
            // source; bundles from area sources were constructed at distance r1)
            if (j < n_vertices - 1) {
                Float seg = (path.vertices[j + 1].hit.position - v.hit.position).norm();
                bundle = propagate_distance(bundle, seg);
            }

            // rotate the carried Stokes into this vertex's incident s/p frame
            Vec3 d_in = -wl_world;
            Vec3 s_in = detail::sp_axis(d_in, frame.n, frame);
            stokes = detail::rotate_stokes(stokes, d_in, stokes_axis, s_in);

            // interaction value in the mode's semantics
            MuellerMatrix factor;
            bool grating_vertex = detail::is_grating_material(&mat);
            if (!v.delta) {
                Float divisor = (j == n_vertices - 1 && path.kind == ConnectionKind::Nee)
                                    ? path.light_pdf
                                    : v.pdf_fwd;
                if (divisor <= 0) { dead = true; break; }
                MuellerMatrix value;
                if (cfg.mode == RenderMode::FullyCoherent) {
                    value = mat.eval_coherent(wv, wl, lambda);
                } else {
                    value = mat.eval_partially_coherent(wv, wl, lambda, bundle.theta);
                }
                // delta lobes blurred into finite kernels keep throughput
                // semantics: no cosine factor
                Float cos_term = grating_vertex ? 1 : std::max(Float(0), wl.z);
                factor = value * (cos_term / divisor);
            } else if (v.lobe == LobeType::GratingOrder) {
                // blurred order under the bundle's diffusivity; the sample stage
                // pinned the direction, so divide by the hero kernel peak
                Mat2 omega = blur_covariance(bundle.theta, lambda);
                if (is_hero) hero_g0[(std::size_t)j] = gaussian_lobe_density({0, 0}, omega);
                Float g0 = hero_g0[(std::size_t)j];
                if (cfg.mode == RenderMode::FullyCoherent) {
                    auto lobes = mat.delta_lobes(wl, lambda);
                    const DeltaLobe *match = detail::match_delta_lobe(lobes, wv, v.lobe);
                    if (!match) { dead = true; break; }
                    factor = match->weight * (1 / v.lobe_prob);
                } else {
                    if (g0 <= 0) { dead = true; break; }
                    MuellerMatrix value = mat.eval_partially_coherent(wv, wl, lambda, bundle.theta);
                    factor = value * (1 / (v.lobe_prob * g0));
                }
            } else {
                // smooth delta lobes (mirror, refract, specular remnant): the
                // direction is wavelength-stable, so re-derive the weight at
                // this wavelength from the light side
                auto lobes = mat.delta_lobes(wl, lambda);
                const DeltaLobe *match = detail::match_delta_lobe(lobes, wv, v.lobe);
                if (!match) { dead = true; break; }
                factor = match->weight * (1 / v.lobe_prob);
            }

            stokes = factor * stokes;
            if (!(stokes.s0 > 0)) { dead = true; break; }

            // transform the bundle's coherence state at the interaction
            if (cfg.mode != RenderMode::FullyCoherent) {
                InteractionKind kind = InteractionKind::specular_reflect();
                if (v.lobe == LobeType::DeltaRefract) {
                    Float eta_fwd = v.eta_ratio > 0 ? 1 / v.eta_ratio : 1;
                    kind = InteractionKind::specular_refract(eta_fwd, std::abs(wl.z),
                                                             std::abs(wv.z));
                } else if (v.lobe == LobeType::Diffuse || v.lobe == LobeType::Glossy) {
                    kind = InteractionKind::diffractive(mat.lobe_angular_covariance(v.lobe));
                }
                bundle = transform_at_interaction(bundle, kind);
            }

            // leave in the outgoing s/p frame
            propagation = wv_world;
            stokes_axis = detail::sp_axis(propagation, frame.n, frame);
        }
        if (dead) continue;

        Float weight = lambdas[si].weight * path.mis * path.rr_weight * path.ms_scale;
        Float value = stokes.s0 * weight;
        if (!(value > 0) || !std::isfinite(value)) continue;
        Vec3 xyz = cie_xyz(lambda) * (value / cie_y_integral());
        out.xyz += xyz;
        out.y += xyz.y;
    }
    return out;
}

} // namespace waveray
