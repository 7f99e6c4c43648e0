// waveray: a spectral wave-optics path tracer
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <zlib.h>

#include "image.hpp"

namespace waveray {

/// Tone-mapped 8-bit sRGB PNG preview (non-normative; the PFM is the reference).
inline void write_png(const Image &img, const std::string &path, float exposure = 1.f) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot open for writing: " + path);

    auto be32 = [](uint32_t v) {
        return std::array<uint8_t, 4>{(uint8_t)(v >> 24), (uint8_t)(v >> 16), (uint8_t)(v >> 8),
                                      (uint8_t)v};
    };
    auto chunk = [&](const char type[4], const std::vector<uint8_t> &payload) {
        auto len = be32((uint32_t)payload.size());
        out.write((const char *)len.data(), 4);
        std::vector<uint8_t> body(4 + payload.size());
        std::memcpy(body.data(), type, 4);
        std::memcpy(body.data() + 4, payload.data(), payload.size());
        out.write((const char *)body.data(), (std::streamsize)body.size());
        auto crc = be32((uint32_t)crc32(0, body.data(), (uInt)body.size()));
        out.write((const char *)crc.data(), 4);
    };

    static const uint8_t sig[8] = {0x89, 'P', 'N', 'G', '\r', '\n', 0x1a, '\n'};
    out.write((const char *)sig, 8);

    std::vector<uint8_t> ihdr;
    for (uint8_t b : be32((uint32_t)img.width)) ihdr.push_back(b);
    for (uint8_t b : be32((uint32_t)img.height)) ihdr.push_back(b);
    ihdr.push_back(8);   // bit depth
    ihdr.push_back(2);   // truecolor
    ihdr.push_back(0);   // deflate
    ihdr.push_back(0);   // filter method
    ihdr.push_back(0);   // no interlace
    chunk("IHDR", ihdr);

    std::vector<uint8_t> raw;
    raw.reserve((std::size_t)img.height * (1 + 3 * img.width));
    for (int y = 0; y < img.height; ++y) {
        raw.push_back(0);  // filter: none
        for (int x = 0; x < img.width; ++x) {
            const float *p = img.pixel(x, y);
            for (int c = 0; c < 3; ++c) raw.push_back(to_srgb8(p[c], exposure));
        }
    }
    uLongf bound = compressBound((uLong)raw.size());
    std::vector<uint8_t> compressed(bound);
    if (compress2(compressed.data(), &bound, raw.data(), (uLong)raw.size(), 6) != Z_OK)
        throw std::runtime_error("png deflate failed");
    compressed.resize(bound);
    chunk("IDAT", compressed);
    chunk("IEND", {});
    if (!out) throw std::runtime_error("write failed: " + path);
}

} // namespace waveray
