// waveray: a spectral wave-optics path tracer
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include "../optics/ior.hpp"
#include "bsdf.hpp"

namespace waveray {

/// Statistical surface of arbitrary roughness under the generalized Harvey-Shack
/// scatter theory with a K-correlation (ABC) power spectral density.
struct HarveyShackSurface {
    Float sigma_h = 50e-9;          // rms roughness, m
    Float psd_amplitude = 1;        // PSD scale; cancels out of the normalized lobe
    Float correlation_length = 2e-6;// l_c, m
    Float falloff_exponent = 2.5;   // c > 1 for an integrable 2-D PSD
    RefractiveIndex base = RefractiveIndex::constant(1.5);
};

/// The BSDF splits into a delta specular remnant exp(-phi^2) and a diffuse lobe
/// shaped by the PSD at spatial frequency f = |wo_xy + wi_xy| / lambda, with the
/// symmetric total-integrated-scatter factor 1 - exp(-(2 pi sigma (ci+co)/lambda)^2).
class HarveyShackBsdf final : public DiffractiveBsdf {
public:
    explicit HarveyShackBsdf(HarveyShackSurface s) : m_s(std::move(s)) {
        if (m_s.falloff_exponent <= 1)
            throw std::invalid_argument("harvey-shack: falloff exponent must exceed 1");
        if (m_s.sigma_h < 0) throw std::invalid_argument("harvey-shack: negative roughness");
        m_b = TwoPi * m_s.correlation_length;
    }

    Float psd(Float f) const {
        return m_s.psd_amplitude *
               std::pow(1 + sqr(m_b * f), -(m_s.falloff_exponent + 1) / 2);
    }

    /// Full-plane PSD integral (closed form, c > 1).
    Float psd_integral_full() const {
        return m_s.psd_amplitude * TwoPi / (m_b * m_b * (m_s.falloff_exponent - 1));
    }

    /// integral of S2(rho) rho drho between rho0 and rho1
    Float psd_radial_segment(Float rho0, Float rho1) const {
        Float c = m_s.falloff_exponent;
        auto anti = [&](Float rho) {
            return -m_s.psd_amplitude / (m_b * m_b * (c - 1)) *
                   std::pow(1 + sqr(m_b * rho), (1 - c) / 2);
        };
        return anti(rho1) - anti(rho0);
    }

    /// PSD mass over the propagating-frequency disk seen from wi.
    Float psd_integral_disk(const Vec3 &wi, Float lambda_nm) const {
        const Float il = 1 / (lambda_nm * 1e-9);
        const Vec2 fc{wi.x * il, wi.y * il};
        const Float r2 = il * il;
        const int n = 256;
        Float acc = 0;
        for (int i = 0; i < n; ++i) {
            Float phi = TwoPi * (i + 0.5) / n;
            Vec2 e{std::cos(phi), std::sin(phi)};
            Float dot = e.dot(fc);
            Float disc = dot * dot - fc.norm2() + r2;
            if (disc <= 0) continue;
            Float rho_max = dot + std::sqrt(disc);
            if (rho_max <= 0) continue;
            acc += psd_radial_segment(0, rho_max);
        }
        return acc * TwoPi / n;
    }

    Float tis(Float ci, Float co, Float lambda_nm) const {
        Float phi = TwoPi * m_s.sigma_h * (ci + co) / (lambda_nm * 1e-9);
        return 1 - std::exp(-phi * phi);
    }

    MuellerMatrix eval_coherent(const Vec3 &wi, const Vec3 &wo, Float lambda_nm) const override {
        if (wi.z <= 0 || wo.z <= 0) return MuellerMatrix::zero();
        const Float lambda_m = lambda_nm * 1e-9;
        Vec2 fv{(wo.x + wi.x) / lambda_m, (wo.y + wi.y) / lambda_m};
        Float value = tis(wi.z, wo.z, lambda_nm) * psd(fv.norm()) /
                      (lambda_m * lambda_m * psd_integral_full());
        Float cbar = 0.5 * (wi.z + wo.z);
        auto fresnel = fresnel_mueller(cbar, 1.0, m_s.base.eval(lambda_nm));
        return fresnel.reflect * value;
    }

    Float pdf(const Vec3 &wi, const Vec3 &wo, Float lambda_nm) const override {
        if (wi.z <= 0 || wo.z <= 0) return 0;
        const Float lambda_m = lambda_nm * 1e-9;
        Vec2 fv{(wo.x + wi.x) / lambda_m, (wo.y + wi.y) / lambda_m};
        Float n_disk = psd_integral_disk(wi, lambda_nm);
        if (n_disk <= 0) return 0;
        Float p_diffuse = tis(wi.z, wi.z, lambda_nm);
        return p_diffuse * psd(fv.norm()) * wo.z / (lambda_m * lambda_m * n_disk);
    }

    std::vector<DeltaLobe> delta_lobes(const Vec3 &wi, Float lambda_nm) const override {
        std::vector<DeltaLobe> lobes;
        if (wi.z <= 0) return lobes;
        Float p_delta = 1 - tis(wi.z, wi.z, lambda_nm);
        if (p_delta <= 0) return lobes;
        auto fresnel = fresnel_mueller(wi.z, 1.0, m_s.base.eval(lambda_nm));
        DeltaLobe l;
        l.wo = Vec3(-wi.x, -wi.y, wi.z);
        l.weight = fresnel.reflect * p_delta;
        l.prob = p_delta;
        l.type = LobeType::DeltaReflect;
        lobes.push_back(l);
        return lobes;
    }

    DirectionSample sample(const Vec3 &wi, Float lambda_nm, Pcg32 &rng) const override {
        DirectionSample s;
        if (wi.z <= 0) return s;
        Float p_delta = 1 - tis(wi.z, wi.z, lambda_nm);
        if (rng.next_float() < p_delta) {
            auto lobes = delta_lobes(wi, lambda_nm);
            s.wo = lobes[0].wo;
            s.pdf = 0;
            s.lobe_prob = p_delta;
            s.lobe = LobeType::DeltaReflect;
            s.weight = lobes[0].weight * (1 / p_delta);
            s.valid = true;
            return s;
        }
        // importance sample a spatial frequency from the radial K-correlation PSD,
        // rejecting frequencies that map outside the propagating disk
        const Float lambda_m = lambda_nm * 1e-9;
        const Float c = m_s.falloff_exponent;
        for (int attempt = 0; attempt < 256; ++attempt) {
            Float u = rng.next_float();
            Float rho = std::sqrt(std::max(Float(0), std::pow(1 - u, 2 / (1 - c)) - 1)) / m_b;
            Float phi = TwoPi * rng.next_float();
            Vec2 f{rho * std::cos(phi), rho * std::sin(phi)};
            Vec2 xy{f.x * lambda_m - wi.x, f.y * lambda_m - wi.y};
            Float r2 = xy.norm2();
            if (r2 >= 1 - 1e-12) continue;
            s.wo = Vec3(xy.x, xy.y, std::sqrt(1 - r2));
            s.pdf = pdf(wi, s.wo, lambda_nm);
            if (s.pdf <= 0) continue;
            s.lobe_prob = 1 - p_delta;
            s.lobe = LobeType::Diffuse;
            Float cos_o = s.wo.z;
            s.weight = eval_coherent(wi, s.wo, lambda_nm) * (cos_o / s.pdf);
            s.valid = true;
            return s;
        }
        return s;
    }

    MuellerMatrix eval_partially_coherent(const Vec3 &wi, const Vec3 &wo, Float lambda_nm,
                                          const CoherenceShapeMatrix &theta) const override {
        // specular remnant blurs into a Gaussian lobe; the diffuse part goes through
        // the generic incident-perturbation quadrature
        Mat2 omega = blur_covariance(theta, lambda_nm);
        MuellerMatrix acc = DiffractiveBsdf::eval_partially_coherent(wi, wo, lambda_nm, theta);
        for (auto &l : delta_lobes(wi, lambda_nm)) {
            Vec2 dev = angular_deviation(wo, l.wo);
            Float g = gaussian_lobe_density(dev, omega);
            if (g > 0) acc += l.weight * g;
        }
        return acc;
    }

    Mat2 lobe_angular_covariance(LobeType lobe) const override {
        if (lobe != LobeType::Diffuse) return Mat2::isotropic(0.0);
        return Mat2::isotropic(m_angular_var_cache > 0 ? m_angular_var_cache
                                                       : compute_angular_variance());
    }

    const HarveyShackSurface &surface() const { return m_s; }

private:
    Float compute_angular_variance() const {
        // mean-square sine-space deviation of the lobe at a reference wavelength,
        // truncated to propagating frequencies; split evenly between the two axes
        const Float lambda_m = 550e-9;
        const Float fmax = 2 / lambda_m;
        const int n = 512;
        Float num = 0, den = 0;
        for (int i = 0; i < n; ++i) {
            Float rho = fmax * (i + 0.5) / n;
            Float w = psd(rho) * rho;
            num += w * rho * rho;
            den += w;
        }
        Float mean_sq = den > 0 ? (num / den) * lambda_m * lambda_m : 1.0;
        Float per_axis = std::min(Float(0.5), mean_sq / 2);
        m_angular_var_cache = per_axis;
        return per_axis;
    }

    HarveyShackSurface m_s;
    Float m_b;  // 2 pi l_c
    mutable Float m_angular_var_cache = -1;
};

} // namespace waveray
