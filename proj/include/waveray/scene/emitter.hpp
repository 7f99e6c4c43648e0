// waveray: a spectral wave-optics path tracer
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <memory>
#include <optional>
#include <string>

#include "../core/image.hpp"
#include "../optics/wavelength.hpp"
#include "geometry.hpp"

namespace waveray {

/// How a light source seeds the solve-stage bundle's coherence.
struct CoherenceSourcing {
    bool distant = false;
    Float solid_angle = 0;   // distant / envmap-cluster subtense [sr]
    Float area = 0;          // area-source patch a [m^2]
};

struct Emitter {
    enum class Kind { Distant, Area, Envmap };

    Kind kind = Kind::Distant;
    std::string name;
    Spectrum spectrum = Spectrum::constant(1);
    std::shared_ptr<EmissionSampler> emission;

    // distant
    Vec3 travel_direction{0, -1, 0};  // direction the light travels
    Float solid_angle = 6.8e-5;

    // area
    int mesh = -1;
    Float mesh_area = 0;
    Float sourcing_area = 10e-6;  // patch a, clamped to the mesh area at load

    // envmap
    Image envmap;
    std::vector<Float> env_row_cdf;   // marginal over rows
    std::vector<Float> env_cdf;       // per-row conditional cdfs, row-major
    Float env_integral = 0;

    Float power_weight = 1;  // emitter-selection weight

    Float radiance(Float lambda_nm) const { return spectrum.eval(lambda_nm); }

    /// Luminance of an envmap texel.
    Float env_texel(int x, int y) const {
        const float *p = envmap.pixel(x, y);
        return 0.2126 * p[0] + 0.7152 * p[1] + 0.0722 * p[2];
    }

    Float env_pixel_solid_angle(int y) const {
        Float theta = Pi * (y + 0.5) / envmap.height;
        return (TwoPi / envmap.width) * (Pi / envmap.height) * std::sin(theta);
    }

    void build_env_tables() {
        const int w = envmap.width, h = envmap.height;
        env_cdf.assign((std::size_t)w * h, 0);
        env_row_cdf.assign(h, 0);
        Float total = 0;
        for (int y = 0; y < h; ++y) {
            Float row = 0;
            for (int x = 0; x < w; ++x) {
                row += env_texel(x, y) * env_pixel_solid_angle(y);
                env_cdf[(std::size_t)y * w + x] = row;
            }
            total += row;
            env_row_cdf[y] = total;
        }
        env_integral = total;
        if (total <= 0) throw std::runtime_error("envmap has no energy");
    }

    /// Direction of an envmap texel center (y-up equirectangular).
    static Vec3 env_direction(Float u, Float v) {
        Float phi = TwoPi * u - Pi;
        Float theta = Pi * v;
        Float st = std::sin(theta);
        return {st * std::cos(phi), std::cos(theta), st * std::sin(phi)};
    }

    static Vec2 env_uv(const Vec3 &d) {
        Float theta = std::acos(clamp(d.y, -1, 1));
        Float phi = std::atan2(d.z, d.x);
        return {(phi + Pi) / TwoPi, theta / Pi};
    }
};

/// One next-event draw toward an emitter.
struct EmitterSample {
    int emitter = -1;
    Vec3 direction;        // from the reference point toward the light
    Float distance = Infinity;
    Float pdf = 0;         // solid-angle density at the reference point
    Float select_prob = 1;
    Vec3 light_point;      // area emitters
    Vec3 light_normal;
    Float env_scale = 1;   // envmap luminance modulation
    CoherenceSourcing sourcing;
    bool valid() const { return pdf > 0; }
};

} // namespace waveray
