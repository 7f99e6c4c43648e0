// waveray: a spectral wave-optics path tracer
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <cstring>
#include <fstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "math.hpp"

namespace waveray {

/// Linear RGB float image, row 0 at the top.
struct Image {
    int width = 0, height = 0;
    std::vector<float> data;  // 3 floats per pixel

    Image() = default;
    Image(int w, int h) : width(w), height(h), data((std::size_t)w * h * 3, 0.f) {}

    float *pixel(int x, int y) { return &data[((std::size_t)y * width + x) * 3]; }
    const float *pixel(int x, int y) const { return &data[((std::size_t)y * width + x) * 3]; }
};

/// 32-bit float PFM, little-endian, 'PF' header. Bit-exact round trips.
inline void write_pfm(const Image &img, const std::string &path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot open for writing: " + path);
    out << "PF\n" << img.width << " " << img.height << "\n-1.0\n";
    // PFM scanlines run bottom-to-top
    for (int y = img.height - 1; y >= 0; --y)
        out.write(reinterpret_cast<const char *>(img.pixel(0, y)),
                  (std::streamsize)img.width * 3 * sizeof(float));
    if (!out) throw std::runtime_error("write failed: " + path);
}

inline Image read_pfm(const std::string &path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot open: " + path);
    std::string magic;
    in >> magic;
    if (magic != "PF") throw std::runtime_error(path + ": not a 3-channel PFM");
    int w, h;
    double scale;
    in >> w >> h >> scale;
    in.get();  // single whitespace after the header
    if (scale >= 0) throw std::runtime_error(path + ": big-endian PFM unsupported");
    Image img(w, h);
    for (int y = h - 1; y >= 0; --y)
        in.read(reinterpret_cast<char *>(img.pixel(0, y)),
                (std::streamsize)w * 3 * sizeof(float));
    if (!in) throw std::runtime_error(path + ": truncated PFM");
    return img;
}

inline uint8_t to_srgb8(float linear, float exposure) {
    float v = linear * exposure;
    v = v <= 0.0031308f ? 12.92f * v : 1.055f * std::pow(v, 1.0f / 2.4f) - 0.055f;
    return (uint8_t)std::lround(clamp(v, 0.0f, 1.0f) * 255.0f);
}

// The 8-bit PNG preview writer lives in core/png.hpp (pulls in zlib).

/// Mean squared error over a region of interest, linear RGB.
inline double image_mse(const Image &a, const Image &b, int x0, int y0, int w, int h) {
    if (a.width != b.width || a.height != b.height)
        throw std::invalid_argument("image_mse: size mismatch");
    x0 = std::max(0, x0);
    y0 = std::max(0, y0);
    int x1 = std::min(a.width, x0 + w), y1 = std::min(a.height, y0 + h);
    double acc = 0;
    long n = 0;
    for (int y = y0; y < y1; ++y)
        for (int x = x0; x < x1; ++x) {
            const float *pa = a.pixel(x, y), *pb = b.pixel(x, y);
            for (int c = 0; c < 3; ++c) acc += sqr((double)pa[c] - pb[c]);
            n += 3;
        }
    return n > 0 ? acc / n : 0;
}

} // namespace waveray
