// waveray: a spectral wave-optics path tracer
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <atomic>
#include <cstdlib>
#include <thread>

#include "../core/image.hpp"
#include "manifold.hpp"
#include "solve.hpp"

namespace waveray {

/// Accumulated render output: tristimulus means plus per-pixel luminance stats.
struct Film {
    int width = 0, height = 0, spp = 0;
    std::vector<double> xyz;    // 3 per pixel, sample means
    std::vector<double> sum_y;  // luminance sums
    std::vector<double> sum_y2; // squared-luminance sums

    Film() = default;
    Film(int w, int h)
        : width(w), height(h), xyz((std::size_t)w * h * 3, 0.0),
          sum_y((std::size_t)w * h, 0.0), sum_y2((std::size_t)w * h, 0.0) {}

    Image to_image() const {
        Image img(width, height);
        for (int y = 0; y < height; ++y)
            for (int x = 0; x < width; ++x) {
                std::size_t i = (std::size_t)y * width + x;
                Vec3 rgb = xyz_to_linear_srgb(
                    Vec3(xyz[3 * i], xyz[3 * i + 1], xyz[3 * i + 2]) / (Float)spp);
                float *p = img.pixel(x, y);
                p[0] = (float)std::max(Float(0), rgb.x);
                p[1] = (float)std::max(Float(0), rgb.y);
                p[2] = (float)std::max(Float(0), rgb.z);
            }
        return img;
    }

    double mean_y(int x, int y) const {
        return sum_y[(std::size_t)y * width + x] / std::max(1, spp);
    }
    double var_y(int x, int y) const {
        std::size_t i = (std::size_t)y * width + x;
        double m = sum_y[i] / std::max(1, spp);
        return std::max(0.0, sum_y2[i] / std::max(1, spp) - m * m);
    }
};

inline int worker_count() {
    unsigned hw = std::max(1u, std::thread::hardware_concurrency());
    if (const char *env = std::getenv("WAVERAY_THREADS")) {
        long v = std::strtol(env, nullptr, 10);
        if (v > 0) hw = std::min<unsigned>(hw, (unsigned)v);
    }
    return (int)hw;
}

/// Render the scene. Accumulation is per-pixel with counter-based RNG streams
/// keyed on (seed, pixel, sample), so the result is bit-identical for any
/// worker count.
inline Film render(const Scene &scene, const RenderConfig &cfg) {
    const int w = scene.camera.width, h = scene.camera.height;
    Film film(w, h);
    film.spp = cfg.spp;
    ManifoldConnector connector(scene, cfg);

    constexpr int Tile = 32;
    const int tiles_x = (w + Tile - 1) / Tile;
    const int tiles_y = (h + Tile - 1) / Tile;
    std::atomic<int> next_tile{0};

    auto worker = [&]() {
        std::vector<CompletedPath> paths;
        for (;;) {
            int tile = next_tile.fetch_add(1);
            if (tile >= tiles_x * tiles_y) return;
            int x0 = (tile % tiles_x) * Tile, y0 = (tile / tiles_x) * Tile;
            for (int y = y0; y < std::min(h, y0 + Tile); ++y)
                for (int x = x0; x < std::min(w, x0 + Tile); ++x) {
                    std::size_t pixel = (std::size_t)y * w + x;
                    double acc[3] = {0, 0, 0};
                    for (int s = 0; s < cfg.spp; ++s) {
                        Pcg32 rng = make_stream(cfg.seed, pixel, (uint64_t)s);
                        Float px = x + rng.next_float();
                        Float py = y + rng.next_float();
                        Ray ray = scene.camera.generate_ray(px, py);
                        auto [hero, hero_pdf] = sample_hero_wavelength(rng.next_float());

                        paths.clear();
                        trace_sample(
                            scene, cfg, ray, hero, rng, paths,
                            [&](const std::vector<PathVertex> &vertices, Float rr,
                                bool dispersive, Pcg32 &r) {
                                connector.connect(vertices, rr, dispersive, hero, r, paths);
                            },
                            [&](const std::vector<PathVertex> &vertices, int chain_start,
                                int emitter, const Vec3 &dir, const Vec3 &point) {
                                return connector.organic_mis(vertices, chain_start, emitter,
                                                             dir, point, hero);
                            });
                        PathContribution total;
                        for (auto &p : paths) {
                            auto c = solve_path(scene, cfg, p, hero, hero_pdf, rng);
                            total.xyz += c.xyz;
                            total.y += c.y;
                        }
                        acc[0] += total.xyz.x;
                        acc[1] += total.xyz.y;
                        acc[2] += total.xyz.z;
                        film.sum_y[pixel] += total.y;
                        film.sum_y2[pixel] += total.y * total.y;
                    }
                    film.xyz[3 * pixel] += acc[0];
                    film.xyz[3 * pixel + 1] += acc[1];
                    film.xyz[3 * pixel + 2] += acc[2];
                }
        }
    };

    int n = std::min(worker_count(), tiles_x * tiles_y);
    if (n <= 1) {
        worker();
    } else {
        std::vector<std::thread> threads;
        for (int i = 0; i < n; ++i) threads.emplace_back(worker);
        for (auto &t : threads) t.join();
    }
    return film;
}

} // namespace waveray
