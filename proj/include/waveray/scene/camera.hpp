// waveray: a spectral wave-optics path tracer
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include "geometry.hpp"

namespace waveray {

/// Pinhole camera; pixel (0,0) is the top-left corner.
struct Camera {
    Vec3 position{0, 0, 0};
    Vec3 forward{0, 0, -1};
    Vec3 up_axis{0, 1, 0};
    Float fov_deg = 40;  // vertical field of view
    int width = 256, height = 256;

    Vec3 right, up;  // derived orthonormal basis

    void finalize() {
        forward = forward.normalized();
        right = forward.cross(up_axis).normalized();
        up = right.cross(forward);
    }

    void look_at(const Vec3 &target) {
        forward = (target - position).normalized();
        finalize();
    }

    /// Camera ray through film point (x, y) in pixel units (jitter included).
    Ray generate_ray(Float x, Float y) const {
        Float tan_half = std::tan(0.5 * deg_to_rad(fov_deg));
        Float aspect = (Float)width / (Float)height;
        Float sx = (2 * x / width - 1) * tan_half * aspect;
        Float sy = (1 - 2 * y / height) * tan_half;
        Ray r;
        r.origin = position;
        r.direction = (forward + right * sx + up * sy).normalized();
        return r;
    }
};

} // namespace waveray
