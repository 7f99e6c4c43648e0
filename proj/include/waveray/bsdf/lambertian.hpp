// waveray: a spectral wave-optics path tracer
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include "bsdf.hpp"

namespace waveray {

/// Idealised diffuse surface acting as a perfect depolarizer.
class LambertianBsdf final : public DiffractiveBsdf {
public:
    explicit LambertianBsdf(Float albedo) : m_albedo(albedo) {
        assert(albedo >= 0 && albedo <= 1);
    }

    MuellerMatrix eval_coherent(const Vec3 &wi, const Vec3 &wo, Float) const override {
        if (wi.z <= 0 || wo.z <= 0) return MuellerMatrix::zero();
        return MuellerMatrix::depolarizer(m_albedo * InvPi);
    }

    Float pdf(const Vec3 &wi, const Vec3 &wo, Float) const override {
        if (wi.z <= 0 || wo.z <= 0) return 0;
        return cosine_hemisphere_pdf(wo.z);
    }

    DirectionSample sample(const Vec3 &wi, Float, Pcg32 &rng) const override {
        DirectionSample s;
        if (wi.z <= 0 || m_albedo <= 0) return s;
        s.wo = sample_cosine_hemisphere(rng.next_2d());
        s.pdf = cosine_hemisphere_pdf(s.wo.z);
        s.lobe_prob = 1;
        s.lobe = LobeType::Diffuse;
        // f cos / pdf = albedo
        s.weight = MuellerMatrix::depolarizer(m_albedo);
        s.valid = true;
        return s;
    }

    MuellerMatrix eval_partially_coherent(const Vec3 &wi, const Vec3 &wo, Float lambda_nm,
                                          const CoherenceShapeMatrix &theta) const override {
        // convolution of a constant: unchanged by any coherence state
        if (theta.theta.det() <= 0)
            throw std::invalid_argument("eval_partially_coherent: singular shape matrix");
        return eval_coherent(wi, wo, lambda_nm);
    }

    Float albedo() const { return m_albedo; }

private:
    Float m_albedo;
};

} // namespace waveray
